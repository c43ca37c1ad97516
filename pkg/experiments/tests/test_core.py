import logging
from os import environ

from merge_advisor.experiments import Application


def test_names_and_prefix():
    app = Application("Merge Advisor")
    assert app.command_name == "merge-advisor"
    assert app.envvar_prefix == "MERGE_ADVISOR_"
    assert app.envvar("seeds") == "MERGE_ADVISOR_SEEDS"
    assert app.replace_names("Run :app_name: via :command_name:") == (
        "Run Merge Advisor via merge-advisor"
    )


def test_dotenv_file(tmp_path, monkeypatch):
    monkeypatch.delenv("TESTAPP_SEEDS", raising=False)
    env = tmp_path / ".env"
    env.write_text("TESTAPP_SEEDS=12\n")
    app = Application("testapp", load_dotenv=env)
    assert app.setting("seeds") == "12"
    environ.pop("TESTAPP_SEEDS")


def test_environment_injection(monkeypatch):
    monkeypatch.delenv("TESTAPP_LABEL", raising=False)
    app = Application("testapp", env=lambda a: {a.envvar("label"): a.name.upper()})
    assert app.setting("label") == "TESTAPP"
    environ.pop("TESTAPP_LABEL")


def test_log_levels():
    app = Application("testapp", log_modules="merge_advisor_test_logs")
    logger = logging.getLogger("merge_advisor_test_logs")
    app.setup_logs(verbose=True)
    assert logger.level == logging.DEBUG
    app.setup_logs(verbose=False)
    assert logger.level == logging.CRITICAL
    assert len(logger.handlers) == 1
