import json
import logging

from tdot.core.logging import JSONFormatter, LoggerFactory


def _record(message="solved"):
    return logging.getLogRecordFactory()(
        "tdot.test", logging.WARNING, __file__, 12, message, None, None, "fn"
    )


def test_json_lines():
    payload = json.loads(JSONFormatter().format(_record()))
    assert payload["level"] == "WARNING"
    assert payload["logger"] == "tdot.test"
    assert payload["message"] == "solved"
    assert payload["line"] == 12


def test_context_props_are_attached_and_removed():
    with LoggerFactory.with_context(k_in=1.26, method="floquet"):
        payload = json.loads(JSONFormatter().format(_record()))
    assert payload["k_in"] == 1.26
    assert payload["method"] == "floquet"
    assert "k_in" not in json.loads(JSONFormatter().format(_record()))


def test_loggers_are_namespaced_and_levelled():
    logger = LoggerFactory.create_logger("LevelCheck")
    assert logger.name == "tdot.LevelCheck"
    assert len(LoggerFactory.create_logger("LevelCheck").handlers) == 1
    LoggerFactory.set_default_level("error")
    try:
        assert logger.level == logging.ERROR
    finally:
        LoggerFactory.set_default_level("INFO")
    assert logger.level == logging.INFO
