import itertools
import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from swarmlink.patterns import (
    ALL_LABELS,
    MotionDirection,
    PatternConfig,
    PatternSchedule,
    SurfaceKind,
    classify_contact,
    decode_label,
    encode_label,
    encode_pattern,
    encode_pattern_by_label,
)

FREQ = {SurfaceKind.SOFT: 3.3, SurfaceKind.ELASTIC: 8.0, SurfaceKind.RIGID: 100.0}


class TestLabelCodec:
    def test_rr_decodes(self):
        assert decode_label("RR") == (SurfaceKind.RIGID, MotionDirection.RIGHT)

    def test_sf_encodes(self):
        assert encode_label(SurfaceKind.SOFT, MotionDirection.FORWARD) == "SF"

    def test_all_twelve_round_trip(self):
        assert len(ALL_LABELS) == 12
        for label in ALL_LABELS:
            s, d = decode_label(label)
            assert encode_label(s, d) == label

    @pytest.mark.parametrize("bad", ["XX", "R", "RRR", "rf", "", "FS"])
    def test_unknown_code_rejected(self, bad):
        with pytest.raises(KeyError):
            decode_label(bad)


class TestEncodePattern:
    def test_rigid_right_onsets(self):
        cfg = PatternConfig(inter_onset_ms=150, burst_ms=300)
        sched = encode_pattern(SurfaceKind.RIGID, MotionDirection.RIGHT, cfg)
        onsets = [line[0].onset_ms for line in sched.actuators]
        assert onsets == [0, 150, 300]
        assert all(
            ev.frequency_hz == 100.0 for line in sched.actuators for ev in line
        )
        assert sched.label == "RR"

    def test_soft_left_is_reversed_at_carrier(self):
        sched = encode_pattern(SurfaceKind.SOFT, MotionDirection.LEFT)
        onsets = [line[0].onset_ms for line in sched.actuators]
        assert onsets == [300, 150, 0]
        assert all(ev.frequency_hz == 3.3 for line in sched.actuators for ev in line)

    def test_forward_onsets_simultaneous_ramp_up(self):
        sched = encode_pattern(SurfaceKind.ELASTIC, MotionDirection.FORWARD)
        for line in sched.actuators:
            assert line[0].onset_ms == 0
            amps = [ev.amplitude for ev in line]
            assert amps == sorted(amps)
            assert amps[0] < amps[-1]

    def test_backward_ramp_down(self):
        sched = encode_pattern(SurfaceKind.ELASTIC, MotionDirection.BACKWARD)
        for line in sched.actuators:
            amps = [ev.amplitude for ev in line]
            assert amps == sorted(amps, reverse=True)

    def test_carrier_frequency_table(self):
        for surface, direction in itertools.product(SurfaceKind, MotionDirection):
            sched = encode_pattern(surface, direction)
            for line in sched.actuators:
                for ev in line:
                    assert ev.frequency_hz == FREQ[surface]

    def test_three_timelines_no_overlap_nonnegative(self):
        for label in ALL_LABELS:
            sched = encode_pattern_by_label(label)
            assert len(sched.actuators) == 3
            for line in sched.actuators:
                end = -1
                for ev in sorted(line, key=lambda e: e.onset_ms):
                    assert ev.onset_ms >= 0
                    assert ev.onset_ms >= end
                    end = ev.onset_ms + ev.duration_ms

    def test_duration_bound(self):
        cfg = PatternConfig(inter_onset_ms=150, burst_ms=300)
        for label in ALL_LABELS:
            sched = encode_pattern_by_label(label, cfg)
            assert sched.duration_ms() <= cfg.burst_ms + 2 * cfg.inter_onset_ms

    def test_right_left_mirror_under_finger_reversal(self):
        for surface in SurfaceKind:
            right = encode_pattern(surface, MotionDirection.RIGHT)
            left = encode_pattern(surface, MotionDirection.LEFT)
            assert right.actuators == tuple(reversed(left.actuators))

    def test_forward_backward_mirror_under_amplitude_reversal(self):
        for surface in SurfaceKind:
            fwd = encode_pattern(surface, MotionDirection.FORWARD)
            back = encode_pattern(surface, MotionDirection.BACKWARD)
            fwd_amps = [ev.amplitude for ev in fwd.actuators[0]]
            back_amps = [ev.amplitude for ev in back.actuators[0]]
            assert fwd_amps == list(reversed(back_amps))

    def test_all_schedules_pairwise_distinct(self):
        encoded = {}
        for label in ALL_LABELS:
            sched = encode_pattern_by_label(label)
            key = json.dumps(
                {"actuators": sched.to_dict()["actuators"]}, sort_keys=True
            )
            assert key not in encoded, f"{label} collides with {encoded.get(key)}"
            encoded[key] = label

    @given(st.integers(10, 500), st.integers(30, 900))
    def test_config_respected(self, inter, burst):
        cfg = PatternConfig(inter_onset_ms=inter, burst_ms=burst)
        sched = encode_pattern(SurfaceKind.RIGID, MotionDirection.RIGHT, cfg)
        onsets = [line[0].onset_ms for line in sched.actuators]
        assert onsets == [0, inter, 2 * inter]


class TestSerialization:
    def test_round_trip_exact(self):
        for label in ALL_LABELS:
            sched = encode_pattern_by_label(label)
            assert PatternSchedule.from_json(sched.to_json()) == sched

    def test_json_shape(self):
        d = encode_pattern_by_label("RR").to_dict()
        assert set(d) == {"label", "actuators"}
        assert len(d["actuators"]) == 3
        ev = d["actuators"][0][0]
        assert set(ev) == {"onset_ms", "duration_ms", "frequency_hz", "amplitude"}


class TestClassifyContact:
    def test_dominant_positive_x_is_right(self):
        out = classify_contact(np.array([0.3, 0.01, 0.0]), SurfaceKind.RIGID)
        assert out == (SurfaceKind.RIGID, MotionDirection.RIGHT)

    def test_negative_y_is_backward(self):
        out = classify_contact(np.array([0.0, -0.2, 0.0]), SurfaceKind.SOFT)
        assert out == (SurfaceKind.SOFT, MotionDirection.BACKWARD)

    def test_dead_band(self):
        assert classify_contact(np.array([0.01, 0.01, 0.0]), SurfaceKind.RIGID) is None

    def test_vertical_motion_ignored(self):
        assert classify_contact(np.array([0.0, 0.0, 1.0]), SurfaceKind.RIGID) is None

    @pytest.mark.parametrize(
        "v,direction",
        [
            ((0.5, 0.0, 0.0), MotionDirection.RIGHT),
            ((-0.5, 0.1, 0.0), MotionDirection.LEFT),
            ((0.1, 0.5, 0.0), MotionDirection.FORWARD),
            ((0.0, -0.5, 0.0), MotionDirection.BACKWARD),
        ],
    )
    def test_all_directions(self, v, direction):
        out = classify_contact(np.array(v), SurfaceKind.ELASTIC)
        assert out == (SurfaceKind.ELASTIC, direction)
