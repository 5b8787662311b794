import math

from rest_framework import serializers

from sysmodel import SUPPORTED_ORDERS

from .network import LossMode

FORMAT_VERSION = 1


def _check_finite(values):
    for position, value in enumerate(values):
        if not math.isfinite(value):
            raise serializers.ValidationError(f"entry {position} is not a finite number")
    return values


def _check_p(value):
    if not 0 < value <= 1:
        raise serializers.ValidationError("must lie in (0, 1]")
    return value


class StrictFloatField(serializers.FloatField):
    """A JSON number; strings and booleans are rejected instead of coerced."""

    def to_internal_value(self, data):
        if isinstance(data, bool) or not isinstance(data, (int, float)):
            self.fail("invalid")
        return super().to_internal_value(data)


class StrictIntegerField(serializers.IntegerField):
    def to_internal_value(self, data):
        if isinstance(data, bool) or not isinstance(data, int):
            self.fail("invalid")
        return super().to_internal_value(data)


class SystemShapeSerializer(serializers.Serializer):
    nt = serializers.IntegerField(min_value=1)
    nr = serializers.IntegerField(min_value=1)
    mod_order = serializers.ChoiceField(choices=SUPPORTED_ORDERS)

    def validate(self, attrs):
        if attrs["nr"] < attrs["nt"]:
            raise serializers.ValidationError(
                {"nr": [f"must be at least nt ({attrs['nt']})"]}
            )
        return attrs


class DpstParamsSerializer(SystemShapeSerializer):
    version = StrictIntegerField()
    T = StrictIntegerField(min_value=1)
    p = StrictFloatField()
    nt = StrictIntegerField(min_value=1)
    nr = StrictIntegerField(min_value=1)
    mod_order = StrictIntegerField()
    gamma = serializers.ListField(child=StrictFloatField(), allow_empty=False)
    theta = serializers.ListField(child=StrictFloatField(), allow_empty=False)

    def validate_version(self, value):
        if value != FORMAT_VERSION:
            raise serializers.ValidationError(
                f"unsupported version {value}, expected {FORMAT_VERSION}"
            )
        return value

    def validate_mod_order(self, value):
        if value not in SUPPORTED_ORDERS:
            raise serializers.ValidationError(
                f"unsupported modulation order {value}, expected one of {list(SUPPORTED_ORDERS)}"
            )
        return value

    def validate_p(self, value):
        return _check_p(value)

    def validate_gamma(self, value):
        return _check_finite(value)

    def validate_theta(self, value):
        return _check_finite(value)

    def validate(self, attrs):
        attrs = super().validate(attrs)
        errors = {}
        for name in ("gamma", "theta"):
            if len(attrs[name]) != attrs["T"]:
                errors[name] = [f"has {len(attrs[name])} entries, T is {attrs['T']}"]
        if errors:
            raise serializers.ValidationError(errors)
        return attrs


class TrainOptionsSerializer(SystemShapeSerializer):
    layers = serializers.IntegerField(min_value=1)
    p = serializers.FloatField()
    batch = serializers.IntegerField(min_value=1)
    steps = serializers.IntegerField(min_value=1)
    lr = serializers.FloatField(min_value=0)
    snr_set = serializers.ListField(child=serializers.FloatField(), allow_empty=False)
    loss = serializers.ChoiceField(choices=LossMode.to_list())
    seed = serializers.IntegerField()
    workers = serializers.IntegerField(min_value=1)
    log_every = serializers.IntegerField(min_value=1)
    out = serializers.CharField()

    def validate_p(self, value):
        return _check_p(value)

    def validate_lr(self, value):
        if not math.isfinite(value):
            raise serializers.ValidationError("must be a finite number")
        return value

    def validate_snr_set(self, value):
        return _check_finite(value)
