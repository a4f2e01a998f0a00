import pytest

from casimirkick.config import OUTPUTS, Axis, SweepSpec, load_config, parse_config, resolved_config_text
from casimirkick.exceptions import ConfigError, ValidationError
from conftest import make_config


def test_minimal_defaults(minimal_text):
    cfg = parse_config(minimal_text)
    assert cfg.cavity.lambda_sq == 0.0 and cfg.cavity.temperature == 0.0 and cfg.cavity.n_th is None
    assert cfg.electron.sigma_x == 1e-6
    assert cfg.flags.is_canonical
    assert cfg.tol == 1e-9
    assert cfg.electron_state == "minimum" and cfg.narrowing == 100.0
    assert cfg.fock_dim is None and cfg.sweep is None
    text = resolved_config_text(cfg)
    for key in ("lambda_sq = 0.0", "sigma_x = 1e-06", "rwa = true", "tol = 1e-09", "svg_column = delta_k"):
        assert key in text


def test_resolved_text_round_trips():
    cfg = make_config("[model]\nrwa = false\nframe = lab\n[sweep]\naxis1 = theta, 0.0, 3.0, 5\noutputs = snr, f\n")
    again = parse_config(resolved_config_text(cfg))
    assert again == cfg
    assert resolved_config_text(again) == resolved_config_text(cfg)


def test_negative_volume_names_field():
    with pytest.raises(ConfigError, match="volume"):
        parse_config("[cavity]\nomega = 1e9\nvolume = -1\n[electron]\nv0 = 1\nflight_length = 1\n")


def test_unknown_key_suggests_nearest(minimal_text):
    with pytest.raises(ConfigError, match="lambda_sq"):
        parse_config(minimal_text.replace("volume = 1e-6", "volume = 1e-6\nlamda = 1e8"))


def test_unknown_section_suggests(minimal_text):
    with pytest.raises(ConfigError, match="'model'"):
        parse_config(minimal_text + "[modle]\ntol = 1e-9\n")


def test_missing_required():
    with pytest.raises(ConfigError, match=r"\[electron\] v0"):
        parse_config("[cavity]\nomega = 1e9\nvolume = 1\n[electron]\nflight_length = 1\n")


@pytest.mark.parametrize(
    "extra",
    [
        "[model]\ntol = 1e-3\n",
        "[model]\nrwa = maybe\n",
        "[model]\nframe = spinning\n",
        "[model]\nelectron_state = wide\n",
        "[fock]\ndim = 1\n",
        "[sweep]\naxis1 = volume, 0, 1, 3\n",
        "[sweep]\naxis1 = r, 0, 1\n",
        "[sweep]\naxis1 = r, 0, 1, 3\naxis2 = r, 0, 1, 3\n",
        "[sweep]\naxis1 = n_th, 0, 1, 3\naxis2 = temperature, 0, 1, 3\n",
        "[sweep]\naxis2 = r, 0, 1, 3\n",
        "[sweep]\naxis1 = r, 0, 1, 3\noutputs = energy\n",
        "[output]\nsvg_column = error\n",
    ],
)
def test_invalid_inputs_raise_config_error(extra):
    with pytest.raises(ConfigError):
        make_config(extra)


def test_both_occupancy_inputs_warn(minimal_text):
    cfg = parse_config(minimal_text.replace("volume = 1e-6", "volume = 1e-6\nn_th = 1.0\ntemperature = 2.0"))
    assert len(cfg.warnings) == 1 and "n_th" in cfg.warnings[0]


def test_outputs_reordered():
    spec = SweepSpec(Axis("r", 0.0, 0.1, 2), outputs=("snr", "delta_k"))
    assert spec.outputs == ("delta_k", "snr")
    assert set(OUTPUTS) >= set(spec.outputs)


def test_axis_validation():
    with pytest.raises(ValidationError):
        Axis("r", 1.0, 0.0, 4)


def test_load_config_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(str(tmp_path / "nope.ini"))


def test_with_tol():
    cfg = make_config()
    assert cfg.with_tol(1e-7).tol == 1e-7
    with pytest.raises(ValidationError):
        cfg.with_tol(1.0)
