import argparse
import sys
from contextlib import contextmanager
from typing import Any, Dict, Iterator, List, Optional, TextIO

from tdot.core.config import FLAT_KEYS, ConfigLoader, RunConfig
from tdot.core.exceptions import BaseError
from tdot.core.logging import LoggerFactory
from tdot.infrastructure.output.writers import create_writer
from tdot.services.spectrum import SpectrumRunner

logger = LoggerFactory.create_logger("main")

COMMANDS = ("spectrum", "resonances", "flips", "compare", "oracle")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tdot",
        description="Transmission through a periodically driven T-coupled quantum dot",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="YAML run configuration (or TDOT_CONFIG)")
    parser.add_argument(
        "--self-check", dest="self_check", action="store_true", default=None
    )
    parser.add_argument("--output", help="result file; stdout when omitted")

    overrides = parser.add_argument_group("overrides")
    for key in FLAT_KEYS:
        if key in ("self_check", "output"):
            continue
        overrides.add_argument(f"--{key.replace('_', '-')}", dest=key, default=None)
    return parser


def collect_overrides(args: argparse.Namespace) -> Dict[str, Any]:
    values = {key: getattr(args, key, None) for key in FLAT_KEYS}
    return {key: value for key, value in values.items() if value is not None}


@contextmanager
def open_output(path: Optional[str]) -> Iterator[TextIO]:
    if path is None:
        yield sys.stdout
        return
    with open(path, "w", newline="") as stream:
        yield stream


class Application:
    def __init__(self, config: RunConfig):
        self.config = config
        self.runner = SpectrumRunner(config)
        self.writer = create_writer(config.output.format)

    def run(self, command: str) -> None:
        resolved = self.config.to_dict()
        context = LoggerFactory.with_context(
            command=command, method=self.config.sweep.method
        )
        with context, open_output(self.config.output.output) as stream:
            if command == "resonances":
                records, note = self.runner.run_resonances()
                rows = [record.to_dict() for record in records]
                self.writer.write_records(rows, resolved, stream, note=note)
            elif command == "flips":
                self.writer.write_records(self.runner.run_flips(), resolved, stream)
            elif command == "compare" or self.config.sweep.method == "compare":
                report = self.runner.run_compare()
                self.writer.write_records(report, resolved, stream)
            elif command == "oracle":
                self.writer.write_spectrum(self.runner.run_oracle(), resolved, stream)
            else:
                self.writer.write_spectrum(self.runner.run_spectrum(), resolved, stream)


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = ConfigLoader(args.config).load_config(collect_overrides(args))
        LoggerFactory.set_default_level(config.log_level)
        logger.info(f"Running {args.command} with method={config.sweep.method}")
        Application(config).run(args.command)
        return 0
    except BaseError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return e.exit_code
    except ValueError as e:
        logger.error(f"Invalid request: {e}")
        return 2


if __name__ == "__main__":
    sys.exit(main())
