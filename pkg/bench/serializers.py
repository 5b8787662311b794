import math

from rest_framework import serializers

from dpst.serializers import SystemShapeSerializer

from .records import BerRecord
from .sweep import is_known_detector


def _finite(value):
    if not math.isfinite(value):
        raise serializers.ValidationError("must be a finite number")
    return value


class BerRecordSerializer(serializers.Serializer):
    detector = serializers.CharField()
    snr_db = serializers.FloatField(validators=[_finite])
    frames = serializers.IntegerField(min_value=1)
    bit_errors = serializers.IntegerField(min_value=0)
    total_bits = serializers.IntegerField(min_value=1)
    ber = serializers.FloatField(min_value=0, max_value=1)
    symbol_errors = serializers.IntegerField(min_value=0)
    ser = serializers.FloatField(min_value=0, max_value=1)
    wall_time_ms = serializers.FloatField(min_value=0, validators=[_finite])

    def validate(self, attrs):
        if attrs["bit_errors"] > attrs["total_bits"]:
            raise serializers.ValidationError(
                {"bit_errors": ["exceeds total_bits"]}
            )
        expected = attrs["bit_errors"] / attrs["total_bits"]
        if not math.isclose(attrs["ber"], expected, rel_tol=1e-12, abs_tol=0):
            raise serializers.ValidationError(
                {"ber": [f"is not bit_errors/total_bits ({expected!r})"]}
            )
        return attrs

    def create(self, validated_data):
        return BerRecord(**validated_data)


class SweepOptionsSerializer(SystemShapeSerializer):
    detectors = serializers.ListField(child=serializers.CharField(), allow_empty=False)
    snr = serializers.ListField(
        child=serializers.FloatField(validators=[_finite]), allow_empty=False
    )
    frames = serializers.IntegerField(min_value=1)
    seed = serializers.IntegerField()
    workers = serializers.IntegerField(min_value=1)
    noise_free = serializers.BooleanField()
    timing = serializers.BooleanField()
    out = serializers.CharField()
    plot_ber = serializers.CharField(required=False, allow_null=True)
    plot_time = serializers.CharField(required=False, allow_null=True)

    def validate_detectors(self, value):
        unknown = [identifier for identifier in value if not is_known_detector(identifier)]
        if unknown:
            raise serializers.ValidationError(
                f"unknown detector(s): {', '.join(unknown)}"
            )
        return value

