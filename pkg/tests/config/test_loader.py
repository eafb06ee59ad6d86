import pytest
from config.loader import *
from physics.schemes import CALCIUM_ETA, PhysicalConstants, SchemeId


def config_text(scheme: str, mode: str, body: str = "") -> str:
    return f"[experiment]\nscheme = {scheme}\nmode = {mode}\n{body}"


def test_defaults():
    config = parse_config(config_text("rwsc", "optimize", "[control]\nhorizon = 400"))

    assert config.name == "experiment"
    assert config.scheme is SchemeId.RWSC
    assert config.consts == PhysicalConstants()
    assert config.space.internal_dim == 2
    assert config.space.fock_dim == DEFAULT_FOCK_DIM
    assert config.nbar0 == DEFAULT_NBAR0
    assert config.level == 0
    assert config.params == {"delta": -1.0, "omega": 0.3}
    assert config.control.horizons == (400.0,)
    assert config.control.free == ("delta", "omega")
    assert config.control.starts == ()
    assert config.control.frechet_method == "blockEnlarge"
    assert config.control.scales == {}
    assert config.scan is None
    assert config.evolve is None
    assert config.output == OutputSettings()


def test_name_and_output():
    body = '[output]\npath = "out/a"\nthreads = 3\n[evolve]\nt_final = 50'
    text = config_text("swsc", "evolve", body).replace(
        "mode = evolve", "mode = evolve\nname = hot_start"
    )
    config = parse_config(text)

    assert config.name == "hot_start"
    assert config.output == OutputSettings("out/a", 3)
    assert config.evolve == EvolveSettings(50.0, 121, 5.0, True)


def test_preset_and_overrides():
    body = "[constants]\npreset = standing_wave\ngamma = 0.2\n[control]\nhorizon = 160"
    config = parse_config(config_text("swsc", "optimize", body))

    assert config.consts.eta == 0.08
    assert config.consts.gamma == 0.2


def test_mhz_units():
    body = """
[constants]
units = mhz
nu_mhz = 2
gamma = 0.2
eta = 0.05
[params]
delta = -2
omega = 0.6
[control]
horizon = 100
"""
    config = parse_config(config_text("rwsc", "optimize", body))

    assert config.consts.gamma == pytest.approx(0.1)
    assert config.consts.eta == 0.05
    assert config.params == pytest.approx({"delta": -1.0, "omega": 0.3})
    assert config.control.horizons == (100.0,)


MHZ = "[constants]\nunits = mhz\nnu_mhz = 2\n"


def test_mhz_starts_and_scales():
    body = MHZ + """
[params]
delta = -2
omega = 0.6
[control]
horizon = 100
starts = [[-2, 0.6], [-1.6, 0.4]]
scale_delta = 4
scale_omega = 1
"""
    config = parse_config(config_text("rwsc", "optimize", body))

    assert config.control.starts == (
        pytest.approx({"delta": -1.0, "omega": 0.3}),
        pytest.approx({"delta": -0.8, "omega": 0.2}),
    )
    assert config.control.starts[0] == pytest.approx(config.params)
    assert config.control.scales == pytest.approx({"delta": 2.0, "omega": 0.5})


def test_mhz_scan_grid():
    body = MHZ + "[control]\nhorizon = 100\n[scan]\nparam = delta\ngrid = [-2, -4]"
    config = parse_config(config_text("rwsc", "scan1d", body))

    assert config.scan.grid == pytest.approx((-1.0, -2.0))


def test_mhz_scan_grid2():
    body = MHZ + """
[control]
horizon = 100
[scan]
param = delta
grid = -2 to -1 by 1
param2 = omega
grid2 = [0.2, 0.6]
"""
    config = parse_config(config_text("rwsc", "scan2d", body))

    assert config.scan.grid == pytest.approx((-1.0, -0.5))
    assert config.scan.grid2 == pytest.approx((0.1, 0.3))


def test_calcium_preset_matches_mhz_file():
    body = "[constants]\nunits = mhz\nnu_mhz = 1.3\ngamma_g = 6.666666666666667\n"
    body += "gamma_r = 13.333333333333334\neta = " + repr(CALCIUM_ETA)
    config = parse_config(config_text("eit4", "eit_compare", body))
    preset = PhysicalConstants.calcium()

    assert config.consts.gamma_g == pytest.approx(preset.gamma_g)
    assert config.consts.gamma_r == pytest.approx(preset.gamma_r)
    assert config.consts.eta == pytest.approx(preset.eta)
    assert config.consts.detuning_offset == 8.0
    assert config.compare == CompareSettings()


def test_mhz_needs_nu_mhz():
    with pytest.raises(NameError, match=r"Missing `nu_mhz` in \[constants\]"):
        parse_config(config_text("rwsc", "steady", "[constants]\nunits = mhz"))


def test_mhz_forbids_nu():
    body = "[constants]\nunits = mhz\nnu_mhz = 1.3\nnu = 1"
    with pytest.raises(NameError, match=r"`nu` is the unit when units = mhz"):
        parse_config(config_text("rwsc", "steady", body))


def test_non_positive_rate():
    with pytest.raises(ValueError, match=r"Decay rate gamma must be positive"):
        parse_config(config_text("rwsc", "steady", "[constants]\ngamma = 0"))


def test_missing_scheme():
    with pytest.raises(NameError, match=r"Missing `scheme` in \[experiment\]"):
        parse_config("[experiment]\nmode = steady")


def test_required_keys():
    with pytest.raises(
        NameError,
        match=r"Mode `optimize` needs `horizon or horizons` in \[control\] on line 3",
    ):
        parse_config(config_text("rwsc", "optimize"))

    with pytest.raises(NameError, match=r"Mode `scan2d` needs `param2` in \[scan\]"):
        body = "[control]\nhorizon = 10\n[scan]\nparam = delta\ngrid = [-1]"
        parse_config(config_text("rwsc", "scan2d", body))


def test_eit_compare_needs_eit4():
    with pytest.raises(ValueError, match=r"set scheme = eit4 on line 2"):
        parse_config(config_text("eit3", "eit_compare"))


def test_params_belong_to_scheme():
    body = "[params]\nomega_g = 1.0"
    with pytest.raises(NameError, match=r"`omega_g` is not a parameter of rwsc on line 5"):
        parse_config(config_text("rwsc", "steady", body))


def test_free_and_starts():
    body = """
[control]
horizons = [50, 100]
free = [omega_g, omega_r]
starts = [[8.0, 7.5], [4, 9]]
history = 5
scale_delta = 20
"""
    config = parse_config(config_text("eit3", "optimize", body))

    assert config.control.horizons == (50.0, 100.0)
    assert config.control.free == ("omega_g", "omega_r")
    assert config.control.starts == (
        {"omega_g": 8.0, "omega_r": 7.5},
        {"omega_g": 4.0, "omega_r": 9.0},
    )
    assert config.control.options.history == 5
    assert config.control.scales == {"delta": 20.0}


def test_start_length():
    body = "[control]\nhorizon = 10\nfree = [delta]\nstarts = [[-1, 0.3]]"
    with pytest.raises(ValueError, match=r"Each start needs 1 values \(delta\), got 2"):
        parse_config(config_text("rwsc", "optimize", body))


def test_free_not_in_scheme():
    body = "[control]\nhorizon = 10\nfree = [delta_g]"
    with pytest.raises(NameError, match=r"`delta_g` is not a parameter of eit3"):
        parse_config(config_text("eit3", "optimize", body))


def test_negative_horizon():
    body = "[control]\nhorizons = [10, -5]"
    with pytest.raises(ValueError, match=r"Horizons must be non-negative on line 5"):
        parse_config(config_text("rwsc", "optimize", body))


def test_frechet_choice():
    body = "[control]\nhorizon = 10\nfrechet = sps"
    config = parse_config(config_text("rwsc", "gradcheck", body))

    assert config.control.frechet_method == "SPS"
    assert config.gradcheck == GradcheckSettings()


def test_scan1d_inner_defaults():
    body = "[control]\nhorizon = 10\n[scan]\nparam = delta\ngrid = -1.1 to -1.0 by 0.05"
    config = parse_config(config_text("rwsc", "scan1d", body))

    assert config.scan == ScanSettings("delta", (-1.1, -1.05, -1.0), ("omega",))


def test_scan1d_param_cannot_be_inner():
    body = "[control]\nhorizon = 10\n"
    body += "[scan]\nparam = delta\ngrid = [-1]\ninner = [delta]"
    with pytest.raises(ValueError, match=r"cannot also be inner"):
        parse_config(config_text("rwsc", "scan1d", body))


def test_scan2d():
    body = """
[control]
horizon = 250
[scan]
param = delta
grid = [-1, -0.9]
param2 = omega
grid2 = 0.3 to 0.5 by 0.1
"""
    config = parse_config(config_text("rwsc", "scan2d", body))

    assert config.scan == ScanSettings(
        "delta", (-1.0, -0.9), (), "omega", (0.3, 0.4, 0.5)
    )


def test_scan2d_same_parameter():
    body = "[control]\nhorizon = 1\n[scan]\nparam = delta\ngrid = [-1]\n"
    body += "param2 = delta\ngrid2 = [-1]"
    with pytest.raises(ValueError, match=r"Cannot scan `delta` against itself"):
        parse_config(config_text("rwsc", "scan2d", body))


def test_steady_sweep():
    config = parse_config(config_text("rwsc", "steady"))
    assert config.scan is None

    body = "[scan]\nparam = omega\ngrid = [0.05, 0.02]"
    config = parse_config(config_text("rwsc", "steady", body))
    assert config.scan == ScanSettings("omega", (0.05, 0.02), ())


def test_optimize_with_fit():
    body = "[control]\nhorizon = 400\n[evolve]\nt_final = 400\nfit = false"
    config = parse_config(config_text("rwsc", "optimize", body))

    assert config.evolve == EvolveSettings(400.0, 121, 5.0, False)


def test_evolve_samples():
    body = "[evolve]\nt_final = 10\nsamples = 1"
    with pytest.raises(ValueError, match=r"at least 2 samples"):
        parse_config(config_text("rwsc", "evolve", body))


def test_initial_state():
    body = "[space]\nfock_dim = 6\n[initial]\nnbar0 = 0.5\nlevel = r"
    config = parse_config(config_text("eit3", "steady", body))

    assert config.space.fock_dim == 6
    assert config.nbar0 == 0.5
    assert config.level == 2


def test_level_out_of_range():
    with pytest.raises(ValueError, match=r"Initial level t does not exist"):
        parse_config(config_text("rwsc", "steady", "[initial]\nlevel = t"))


def test_eit_compare_level_in_both_models():
    config = parse_config(config_text("eit4", "eit_compare", "[initial]\nlevel = r"))
    assert config.level == 2

    with pytest.raises(ValueError, match=r"does not exist in a 3-level"):
        parse_config(config_text("eit4", "eit_compare", "[initial]\nlevel = t"))


def test_eit_compare_fit_window():
    assert parse_config(config_text("eit4", "eit_compare")).evolve is None

    body = "[compare]\nt_eval = 600\n[evolve]\nfit_start = 50\nsamples = 61"
    config = parse_config(config_text("eit4", "eit_compare", body))

    assert config.evolve == EvolveSettings(600.0, 61, 50.0, True)


def test_negative_nbar0():
    with pytest.raises(ValueError, match=r"nbar0 must be non-negative"):
        parse_config(config_text("rwsc", "steady", "[initial]\nnbar0 = -1"))


def test_describe():
    body = "[control]\nhorizon = 10\n[space]\nfock_dim = 5"
    description = parse_config(config_text("rwsc", "optimize", body)).describe()

    assert description["scheme"] == "rwsc"
    assert description["space"] == {"internal_dim": 2, "fock_dim": 5}
    assert description["control"]["horizons"] == [10.0]
    assert description["file"]["space"] == {"fock_dim": 5}


def test_load_config_uses_file_stem(tmp_path):
    path = tmp_path / "hot_run.cfg"
    path.write_text(config_text("rwsc", "steady"), encoding="utf-8")

    assert load_config(str(path)).name == "hot_run"


def test_missing_file(tmp_path):
    with pytest.raises(OSError):
        load_config(str(tmp_path / "absent.cfg"))
