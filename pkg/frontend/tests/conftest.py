import json

import pytest

SWEEP_CSV = """eps_ratio,alpha,tau,p_bound_exact,p_bound_pert,status
0,0,nan,1,,ok
0,1,nan,1,,ok
0,2,nan,1,,ok
4,0,8685.1,0.41,,ok
4,1,8685.1,0.52,,ok
4,2,8685.1,0.63,,ok
8,0,4342.5,0.11,,ok
8,1,4342.5,0.22,,ok
8,2,4342.5,0.33,,solver-failed
"""

SEPARATRIX_CSV = """alpha,eps0_crit_ratio,s_star
0.01,1.000012,-0.005
1,1.1343,-0.4515
2,1.7398,-0.7531
"""

DYN_EPS_CSV = """re_t_over_tau,im_t_over_tau,residual,re_sigma,im_sigma,re_a,im_a,pair_id
-0.9,0.8,1e-14,0.31,-0.52,0.9,0.1,0
0.9,0.8,1e-14,0.31,0.52,0.9,-0.1,0
0,-1.4,2e-14,,,,,
"""

EMPTY_DYN_EPS_CSV = (
    "re_t_over_tau,im_t_over_tau,residual,re_sigma,im_sigma,re_a,im_a,pair_id\n"
)

CONTOUR_META = {"omega_ep": 1.50224219370677, "eps0_ep": 5.58232764887938e-4,
                "eps0_max": 2.79e-3, "alpha": 1.0, "tau": 300.0}

CONTOUR_CSV = "# " + json.dumps(CONTOUR_META, sort_keys=True) + """
t_over_tau,omega,eps0
-6,1.5019,1e-8
-3,1.50208,3.1e-5
0,1.502242,2.79e-3
3,1.50241,3.1e-5
6,1.50259,1e-8
"""

FIELD_META = {"eps0_max": 9.2e-4, "alpha": 0.0, "tau": 1.0, "mu_im": 0.0}


def make_field_csv() -> str:
    lines = ["# " + json.dumps(FIELD_META, sort_keys=True),
             "re_t_over_tau,im_t_over_tau,abs_split"]
    res = [-2.0, -1.0, 0.0, 1.0, 2.0]
    ims = [-1.0, 0.0, 1.0]
    for re in res:
        for im in ims:
            # synthetic magnitude with zeros at +-1 on the real axis
            val = abs((re + 1j * im) ** 2 - 1.0) * 1e-4
            lines.append(f"{re},{im},{val:.17g}")
    return "\n".join(lines) + "\n"


def _write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


@pytest.fixture
def sweep_file(tmp_path):
    return _write(tmp_path, "sweep.csv", SWEEP_CSV)


@pytest.fixture
def separatrix_file(tmp_path):
    return _write(tmp_path, "sep.csv", SEPARATRIX_CSV)


@pytest.fixture
def dyn_eps_file(tmp_path):
    return _write(tmp_path, "roots.csv", DYN_EPS_CSV)


@pytest.fixture
def empty_dyn_eps_file(tmp_path):
    return _write(tmp_path, "noroots.csv", EMPTY_DYN_EPS_CSV)


@pytest.fixture
def contour_file(tmp_path):
    return _write(tmp_path, "contour.csv", CONTOUR_CSV)


@pytest.fixture
def field_file(tmp_path):
    return _write(tmp_path, "field.csv", make_field_csv())
