from django.conf import settings
from rest_framework import serializers

from prhr.choices import Alternative, ElRule, Scenario
from prhr.distributions import MAX_SEED
from prhr.exceptions import SchemaError
from prhr.samples import ColumnSpec
from prhr.simulation import TABLE_PRESETS

COLUMN_FIELDS = ("x_col", "y_col", "group_col", "value_col", "baseline", "other")


def _defaults() -> dict:
    return getattr(settings, "PRHR", {})


class ColumnSpecSerializer(serializers.Serializer):
    """
    Validates the CSV column mapping shared by `test` and `loglog`.

    - x_col, y_col: one column per group
    - group_col, value_col, baseline: long layout, baseline is X
    """

    x_col = serializers.CharField(required=False, allow_null=True, default=None)
    y_col = serializers.CharField(required=False, allow_null=True, default=None)
    group_col = serializers.CharField(required=False, allow_null=True, default=None)
    value_col = serializers.CharField(required=False, allow_null=True, default=None)
    baseline = serializers.CharField(required=False, allow_null=True, default=None)
    other = serializers.CharField(required=False, allow_null=True, default=None)

    def validate(self, attrs):
        try:
            ColumnSpec(**{key: attrs[key] for key in COLUMN_FIELDS}).validate()
        except SchemaError as exc:
            raise serializers.ValidationError(str(exc)) from exc
        return attrs

    def to_spec(self) -> ColumnSpec:
        return ColumnSpec(**{key: self.validated_data[key] for key in COLUMN_FIELDS})


class TestOptionsSerializer(ColumnSpecSerializer):
    alternative = serializers.ChoiceField(
        choices=Alternative.choices, default=Alternative.INCREASING
    )
    alpha = serializers.FloatField(required=False, allow_null=True, default=None)
    theta = serializers.FloatField(required=False, allow_null=True, default=None)
    el_rule = serializers.ChoiceField(choices=ElRule.choices, default=ElRule.GATED)

    def validate_alpha(self, value):
        if value is None:
            value = _defaults().get("DEFAULT_ALPHA", 0.05)
        if not 0.0 < value < 1.0:
            raise serializers.ValidationError("alpha must lie strictly between 0 and 1.")
        return value

    def validate_theta(self, value):
        if value is not None and not (0.0 < value < float("inf")):
            raise serializers.ValidationError("theta must be a positive finite number.")
        return value


class SimulateOptionsSerializer(serializers.Serializer):
    """
    Validates `simulate` options.

    - scenario with params, or a numbered table preset
    - m and n: equal-length lists paired elementwise
    """

    scenario = serializers.ChoiceField(
        choices=Scenario.choices, required=False, allow_null=True, default=None
    )
    table = serializers.ChoiceField(
        choices=sorted(TABLE_PRESETS), required=False, allow_null=True, default=None
    )
    params = serializers.ListField(
        child=serializers.FloatField(), required=False, allow_null=True, default=None
    )
    m = serializers.ListField(
        child=serializers.IntegerField(min_value=3),
        required=False,
        allow_null=True,
        default=None,
    )
    n = serializers.ListField(
        child=serializers.IntegerField(min_value=3),
        required=False,
        allow_null=True,
        default=None,
    )
    reps = serializers.IntegerField(
        min_value=1, required=False, allow_null=True, default=None
    )
    alphas = serializers.ListField(
        child=serializers.FloatField(), required=False, allow_null=True, default=None
    )
    seed = serializers.IntegerField(
        min_value=0, max_value=MAX_SEED, required=False, allow_null=True, default=None
    )
    workers = serializers.IntegerField(
        min_value=1, required=False, allow_null=True, default=None
    )
    el_rule = serializers.ChoiceField(choices=ElRule.choices, default=ElRule.GATED)

    def validate_params(self, value):
        if value is not None and any(not (0.0 < p < float("inf")) for p in value):
            raise serializers.ValidationError("Scenario parameters must be positive.")
        return value

    def validate_alphas(self, value):
        if value is None:
            return tuple(_defaults().get("DEFAULT_ALPHAS", (0.01, 0.05, 0.10)))
        if not value or any(not 0.0 < a < 1.0 for a in value):
            raise serializers.ValidationError(
                "Every alpha must lie strictly between 0 and 1."
            )
        return tuple(value)

    def validate_reps(self, value):
        return _defaults().get("DEFAULT_REPS", 10000) if value is None else value

    def validate_seed(self, value):
        return _defaults().get("DEFAULT_SEED", 20240601) if value is None else value

    def validate(self, attrs):
        if (attrs["scenario"] is None) == (attrs["table"] is None):
            raise serializers.ValidationError("Give exactly one of --scenario or --table.")

        if attrs["table"] is not None:
            if any(attrs[k] is not None for k in ("params", "m", "n")):
                raise serializers.ValidationError(
                    "--table fixes the parameter and size grid; drop --param/--m/--n."
                )
            return attrs

        missing = [k for k in ("params", "m", "n") if not attrs[k]]
        if missing:
            raise serializers.ValidationError(
                f"--scenario needs {', '.join('--' + k.rstrip('s') for k in missing)}."
            )
        if len(attrs["m"]) != len(attrs["n"]):
            raise serializers.ValidationError(
                "--m and --n take lists of equal length, paired elementwise."
            )
        attrs["sizes"] = list(zip(attrs["m"], attrs["n"]))
        return attrs


class MethodResultSerializer(serializers.Serializer):
    method = serializers.CharField()
    statistic = serializers.FloatField(allow_null=True)
    p_value = serializers.FloatField(allow_null=True)
    decision = serializers.CharField()
    degenerate = serializers.BooleanField()
    detail = serializers.CharField(allow_blank=True)


class TestReportSerializer(serializers.Serializer):
    """Every field is present on every run; degenerate methods carry null numbers."""

    m = serializers.IntegerField()
    n = serializers.IntegerField()
    tau_hat = serializers.FloatField()
    theta_hat = serializers.FloatField(allow_null=True)
    u_value = serializers.FloatField()
    alternative = serializers.CharField()
    alpha = serializers.FloatField()
    el_rule = serializers.CharField()
    methods = serializers.DictField(child=MethodResultSerializer())
