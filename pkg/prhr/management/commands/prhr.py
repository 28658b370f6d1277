import logging
import sys

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError
from rest_framework import serializers
from rest_framework.renderers import JSONRenderer

from prhr.choices import Alternative, ElRule, Scenario
from prhr.exceptions import NumericalFailureError, PrhrError
from prhr.samples import loglog_csv, parse_two_samples
from prhr.serializers import (
    ColumnSpecSerializer,
    SimulateOptionsSerializer,
    TestOptionsSerializer,
    TestReportSerializer,
)
from prhr.services import LogLogService, PrhrTestService, SimulationService

logger = logging.getLogger("prhr")

INPUT_ERROR = 2
NUMERICAL_FAILURE = 3


def _flatten(detail) -> str:
    """One line per message out of a DRF error detail."""
    if isinstance(detail, dict):
        lines = []
        for key, value in detail.items():
            prefix = "" if key == "non_field_errors" else f"{key}: "
            lines.extend(prefix + line for line in _flatten(value).splitlines())
        return "\n".join(lines)
    if isinstance(detail, list):
        return "\n".join(_flatten(item) for item in detail)
    return str(detail)


class Command(BaseCommand):
    help = (
        "Two-sample tests of proportional reversed hazards: "
        "`test` a CSV pair, `simulate` size/power tables, `loglog` plot data."
    )

    def add_arguments(self, parser):
        subparsers = parser.add_subparsers(dest="subcommand", required=True)

        test = subparsers.add_parser("test", help="Run U_MW, JEL and AJEL on a CSV pair.")
        self._add_csv_arguments(test)
        test.add_argument(
            "--alternative",
            choices=Alternative.values,
            default=Alternative.INCREASING.value,
        )
        test.add_argument("--alpha", type=float, default=None)
        test.add_argument(
            "--theta", type=float, default=None, help="Null resilience parameter for U_MW."
        )
        test.add_argument("--el-rule", choices=ElRule.values, default=ElRule.GATED.value)

        simulate = subparsers.add_parser("simulate", help="Monte Carlo size/power table.")
        simulate.add_argument("--scenario", choices=Scenario.values, default=None)
        simulate.add_argument("--table", type=int, default=None)
        simulate.add_argument(
            "--param",
            "--theta",
            "--alpha2",
            "--gamma",
            dest="params",
            type=float,
            nargs="+",
            default=None,
        )
        simulate.add_argument("--m", type=int, nargs="+", default=None)
        simulate.add_argument("--n", type=int, nargs="+", default=None)
        simulate.add_argument("--reps", type=int, default=None)
        simulate.add_argument("--alphas", type=float, nargs="+", default=None)
        simulate.add_argument("--seed", type=int, default=None)
        simulate.add_argument("--workers", type=int, default=None)
        simulate.add_argument("--el-rule", choices=ElRule.values, default=ElRule.GATED.value)
        simulate.add_argument("--output", default=None)

        loglog = subparsers.add_parser("loglog", help="log(-log Fn) plot data for both groups.")
        self._add_csv_arguments(loglog)

    @staticmethod
    def _add_csv_arguments(parser):
        parser.add_argument("csv", help="Path to a UTF-8 CSV file, or - for stdin.")
        parser.add_argument("--x-col", default=None)
        parser.add_argument("--y-col", default=None)
        parser.add_argument("--group-col", default=None)
        parser.add_argument("--value-col", default=None)
        parser.add_argument("--baseline", default=None, help="Group label of X.")
        parser.add_argument("--other", default=None, help="Group label of Y.")
        parser.add_argument("--output", default=None)

    def handle(self, *args, **options):
        handlers = {
            "test": self._test,
            "simulate": self._simulate,
            "loglog": self._loglog,
        }
        try:
            text = handlers[options["subcommand"]](options)
        except NumericalFailureError as exc:
            logger.error(f"Numerical failure: {exc}")
            raise CommandError(str(exc), returncode=NUMERICAL_FAILURE) from exc
        except PrhrError as exc:
            raise CommandError(str(exc), returncode=INPUT_ERROR) from exc
        except serializers.ValidationError as exc:
            raise CommandError(_flatten(exc.detail), returncode=INPUT_ERROR) from exc
        except OSError as exc:
            raise CommandError(f"Cannot read input: {exc}", returncode=INPUT_ERROR) from exc
        except CommandError:
            raise
        except Exception:
            logger.exception(f"Unexpected failure in `prhr {options['subcommand']}`")
            raise

        self._emit(text, options["output"])

    def _read_samples(self, options, serializer: ColumnSpecSerializer):
        serializer.is_valid(raise_exception=True)
        path = options["csv"]
        if path == "-":
            raw = sys.stdin.buffer.read()
        else:
            with open(path, "rb") as f:
                raw = f.read()
        return parse_two_samples(raw, serializer.to_spec())

    def _test(self, options) -> str:
        serializer = TestOptionsSerializer(data=options)
        x, y = self._read_samples(options, serializer)
        data = serializer.validated_data

        report = PrhrTestService().run(
            x,
            y,
            alternative=data["alternative"],
            alpha=data["alpha"],
            theta=data["theta"],
            el_rule=data["el_rule"],
        )
        rendered = JSONRenderer().render(TestReportSerializer(report).data)
        return rendered.decode("utf-8") + "\n"

    def _simulate(self, options) -> str:
        serializer = SimulateOptionsSerializer(data=options)
        serializer.is_valid(raise_exception=True)
        data = serializer.validated_data

        service = SimulationService(max_workers=data["workers"])
        if data["table"] is not None:
            table = service.run_table(
                data["table"],
                reps=data["reps"],
                seed=data["seed"],
                el_rule=data["el_rule"],
                alphas=data["alphas"],
            )
        else:
            table = service.run(
                data["scenario"],
                data["params"],
                data["sizes"],
                reps=data["reps"],
                alphas=data["alphas"],
                seed=data["seed"],
                el_rule=data["el_rule"],
            )
        return table.to_tsv(float_format=settings.PRHR["FLOAT_FORMAT"])

    def _loglog(self, options) -> str:
        x, y = self._read_samples(options, ColumnSpecSerializer(data=options))
        series = LogLogService().build(x, y)
        return loglog_csv(series, float_format=settings.PRHR["FLOAT_FORMAT"])

    def _emit(self, text: str, output: str | None) -> None:
        if output is None:
            self.stdout.write(text, ending="")
            return
        try:
            with open(output, "w", encoding="utf-8", newline="") as f:
                f.write(text)
        except OSError as exc:
            raise CommandError(f"Cannot write {output}: {exc}", returncode=INPUT_ERROR) from exc
        self.stderr.write(self.style.SUCCESS(f"Wrote {output}"))
