import pytest

from gausson_lab.config import ExperimentConfig, format_value, load_config, parse_config
from gausson_lab.errors import ConfigError


class TestParseConfig:
    def test_empty_text_gives_defaults(self):
        config = parse_config("")
        assert config == ExperimentConfig()
        assert (config.gamma, config.omega, config.L, config.n) == (1.0, 1.0, 12.0, 1537)
        assert (config.dt, config.T, config.m_reg, config.tol) == (1e-3, 20.0, 1e8, 1e-8)

    def test_values_comments_and_lists(self):
        text = "# sweep setup\ngamma=2.5\nomega = -0.5\nomegas=0,1.5\nperturbation=bump\nRecord_Every=10\n"
        config = parse_config(text)
        assert config.gamma == 2.5
        assert config.omega == -0.5
        assert config.omegas == (0.0, 1.5)
        assert config.perturbation == "bump"
        assert config.record_every == 10

    def test_overrides_win_over_file(self):
        config = parse_config("gamma=2\nn=769\n", {"gamma": 3.0, "n": None, "m-reg": 1e6})
        assert config.gamma == 3.0
        assert config.n == 769
        assert config.m_reg == 1e6

    def test_even_node_count_names_the_key(self):
        with pytest.raises(ConfigError) as info:
            parse_config("n=1536\n")
        assert info.value.key == "n"
        assert "n" in str(info.value)

    def test_unknown_key(self):
        with pytest.raises(ConfigError) as info:
            parse_config("bogus=1\n")
        assert info.value.key == "bogus"

    @pytest.mark.parametrize("text, key", [("dt=abc\n", "dt"), ("n=12.5\n", "n"), ("gammas=1,x\n", "gammas")])
    def test_malformed_values(self, text, key):
        with pytest.raises(ConfigError) as info:
            parse_config(text)
        assert info.value.key == key

    @pytest.mark.parametrize(
        "text, key",
        [("L=0\n", "L"), ("m_reg=10\n", "m_reg"), ("perturbation=shake\n", "perturbation"), ("gammas=\n", "gammas")],
    )
    def test_invalid_values(self, text, key):
        with pytest.raises(ConfigError) as info:
            parse_config(text)
        assert info.value.key == key

    def test_resolved_text_reproduces_config(self):
        config = parse_config("gamma=0.1\nomega=-1.25\ndt=2.5e-4\ngammas=0.3,0.7\n")
        assert parse_config(config.to_text()) == config

    def test_load_from_file(self, tmp_path):
        path = tmp_path / "run.env"
        path.write_text("omega=0.5\nT=2\n", encoding="utf-8")
        config = load_config(str(path), {"T": 1.0})
        assert config.omega == 0.5
        assert config.T == 1.0
        assert load_config(None) == ExperimentConfig()


class TestBuilders:
    def test_settings_objects(self):
        config = parse_config("gamma=2\nm_reg=1e6\ndt=1e-2\nT=0.5\ntol=1e-9\nepsilon=0.01\nseed=7\n")
        assert config.grid().h == pytest.approx(1 / 64)
        assert config.params().reg.m == 1e6
        assert config.integrator().steps == 50
        assert config.integrator().reg.m == 1e6
        assert config.solver().tol == 1e-9
        spec = config.perturbation_spec()
        assert (spec.kind, spec.epsilon, spec.seed) == ("random_h1", 0.01, 7)

    def test_format_value(self):
        assert format_value(0.1) == "0.10000000000000001"
        assert format_value((0.5, 1.0)) == "0.5,1"
        assert format_value(True) == "true"
        assert format_value(1537) == "1537"
