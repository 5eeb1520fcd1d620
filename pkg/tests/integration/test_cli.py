"""Integration tests for the command-line interface."""

import json

import pytest

from crsec.cli.config import load_config
from crsec.cli.main import cli_main
from crsec.storage.channel_file import channel_fingerprint, channel_to_dict, file_fingerprint, load_channel_set
from crsec.utils.logging import setup_logging
from crsec.storage.solution_file import load_solution_dict


@pytest.mark.integration
class TestCli:
    """Test commands end to end through cli_main."""

    def test_gen_channels_then_solve(self, temp_dir):
        """Test a generated channel file can be solved and written."""
        channels = temp_dir / "ch.json"
        solution = temp_dir / "sol.json"

        assert cli_main(["gen-channels", "--seed", "3", "--out", str(channels)]) == 0
        assert load_channel_set(channels).n_t == 2

        code = cli_main([
            "solve", "--channels", str(channels), "--pt", "10",
            "--scheme", "NRS", "--eps", "1e-2", "--out", str(solution),
        ])

        assert code == 0
        data = load_solution_dict(solution)
        assert data["scheme"] == "NRS"
        assert data["theta"] == 1.0
        assert data["power"]["p_r"] == 10.0

    def test_gen_channels_is_deterministic(self, temp_dir):
        """Test the same seed and trial write identical bytes."""
        a, b = temp_dir / "a.json", temp_dir / "b.json"
        cli_main(["gen-channels", "--seed", "5", "--trial", "2", "--nt", "3", "--out", str(a)])
        cli_main(["gen-channels", "--seed", "5", "--trial", "2", "--nt", "3", "--out", str(b)])

        assert a.read_bytes() == b.read_bytes()
        assert load_channel_set(a).n_t == 3

    def test_gen_channels_reads_config(self, temp_dir):
        """Test seed and antenna count come from the config file unless given as flags."""
        config = temp_dir / "crsec.yaml"
        config.write_text("montecarlo:\n  seed: 9\n  n_t: 4\n")
        a, b = temp_dir / "a.json", temp_dir / "b.json"

        assert cli_main(["gen-channels", "-c", str(config), "--out", str(a)]) == 0
        assert cli_main(["gen-channels", "--seed", "9", "--nt", "4", "--out", str(b)]) == 0

        assert load_channel_set(a).n_t == 4
        assert a.read_bytes() == b.read_bytes()

    def test_unknown_scheme_is_usage_error(self, temp_dir):
        """Test a bad --scheme value exits with code 2."""
        channels = temp_dir / "ch.json"
        cli_main(["gen-channels", "--out", str(channels)])

        assert cli_main(["solve", "--channels", str(channels), "--pt", "10", "--scheme", "bogus"]) == 2

    def test_missing_required_option(self):
        """Test omitting --pt is a usage error."""
        assert cli_main(["solve", "--channels", "ch.json"]) == 2

    def test_missing_channel_file(self, temp_dir, capsys):
        """Test an unreadable channel file is a runtime failure."""
        code = cli_main(["solve", "--channels", str(temp_dir / "absent.json"), "--pt", "10"])

        assert code == 1
        assert "Failed to read channel file" in capsys.readouterr().err

    def test_invalid_channel_file(self, temp_dir, capsys):
        """Test an unknown key in a channel file is reported."""
        channels = temp_dir / "bad.json"
        channels.write_text('{"n_t": 2, "x": 1}')

        assert cli_main(["solve", "--channels", str(channels), "--pt", "10"]) == 1
        assert "channel file" in capsys.readouterr().err.lower()

    def test_bad_config_value(self, temp_dir):
        """Test configuration errors exit with code 1."""
        channels = temp_dir / "ch.json"
        cli_main(["gen-channels", "--out", str(channels)])

        assert cli_main(["solve", "--channels", str(channels), "--pt", "10", "--eps", "0"]) == 1

    def test_check_failure(self, mocker):
        """Test a failing invariant suite exits with code 1."""
        mocker.patch("crsec.cli.main.check_command", return_value=False)
        assert cli_main(["check"]) == 1

    def test_check_success(self, mocker):
        """Test a passing invariant suite exits with code 0."""
        mocker.patch("crsec.cli.main.check_command", return_value=True)
        assert cli_main(["check"]) == 0

    def test_montecarlo_rejects_bad_grid(self, temp_dir):
        """Test a malformed SNR grid exits with code 1."""
        assert cli_main(["montecarlo", "--snr", "30:5:0", "--out", str(temp_dir / "r.csv")]) == 1

    def test_version(self, capsys):
        """Test the version command."""
        assert cli_main(["version"]) == 0
        assert "crsec" in capsys.readouterr().out

    def test_solution_records_file_fingerprint(self, temp_dir):
        """Test the solution carries the digest of the channel file as given."""
        channels = temp_dir / "ch.json"
        cli_main(["gen-channels", "--seed", "4", "--out", str(channels)])
        cs = load_channel_set(channels)
        pretty = temp_dir / "pretty.json"
        pretty.write_text(json.dumps(channel_to_dict(cs), indent=4), encoding="utf-8")
        solution = temp_dir / "sol.json"

        code = cli_main([
            "solve", "--channels", str(pretty), "--pt", "10",
            "--scheme", "MULP", "--eps", "1e-2", "--out", str(solution),
        ])

        assert code == 0
        data = load_solution_dict(solution)
        assert data["channel_fingerprint"] == file_fingerprint(pretty)
        assert data["channel_fingerprint"] != channel_fingerprint(cs)


@pytest.mark.integration
class TestCliSetup:
    """Test configuration scaffolding and logging options."""

    def test_init_config_writes_loadable_file(self, temp_dir):
        """Test init-config writes an example that loads back."""
        out = temp_dir / "conf" / "crsec.yaml"

        assert cli_main(["init-config", "--out", str(out)]) == 0
        assert load_config(config_file=out)["montecarlo"]["trials"] == 20

    def test_init_config_keeps_existing_file(self, temp_dir):
        """Test an existing file is only replaced with --force."""
        out = temp_dir / "crsec.yaml"
        out.write_text("montecarlo:\n  seed: 9\n")

        assert cli_main(["init-config", "--out", str(out)]) == 1
        assert out.read_text() == "montecarlo:\n  seed: 9\n"

        assert cli_main(["init-config", "--out", str(out), "--force"]) == 0
        assert out.read_text().startswith("# crsec configuration")

    def test_log_file_receives_records(self, temp_dir):
        """Test --log-file collects the run's log records."""
        channels, log = temp_dir / "ch.json", temp_dir / "logs" / "run.log"
        cli_main(["gen-channels", "--out", str(channels)])
        try:
            code = cli_main([
                "solve", "--channels", str(channels), "--pt", "10", "--scheme", "NRS",
                "--eps", "1e-2", "--log-file", str(log),
            ])
        finally:
            setup_logging()

        assert code == 0
        assert "Solving NRS on channel" in log.read_text(encoding="utf-8")

    def test_json_logs(self, temp_dir):
        """Test --json-logs writes one JSON object per line."""
        channels, log = temp_dir / "ch.json", temp_dir / "run.jsonl"
        cli_main(["gen-channels", "--out", str(channels)])
        try:
            code = cli_main([
                "solve", "--channels", str(channels), "--pt", "10", "--scheme", "NRS",
                "--eps", "1e-2", "--log-file", str(log), "--json-logs",
            ])
        finally:
            setup_logging()

        assert code == 0
        records = [json.loads(line) for line in log.read_text(encoding="utf-8").splitlines()]
        assert records
        assert {"timestamp", "level", "logger", "message"} <= set(records[0])
        assert any(r["message"].startswith("Solving NRS") for r in records)

    def test_unwritable_log_file(self, temp_dir):
        """Test a log file that cannot be opened is a runtime failure."""
        blocker = temp_dir / "file"
        blocker.write_text("")
        try:
            assert cli_main(["check", "--log-file", str(blocker / "run.log")]) == 1
        finally:
            setup_logging()
