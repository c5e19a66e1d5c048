"""Super-synchronous frequency estimator.

Per hop, the estimator takes the trailing window, measures the fundamental
with an exact-period rectangular DFT, subtracts it, and scans the
super-synchronous band with a Hann-windowed DFT plus log-quadratic bin
interpolation.  One clean-up pass (subtract the found tone, re-measure the
fundamental, re-scan) removes the mutual leakage between the fundamental
and band-edge tones.

Publication is two-stage: a band peak above `threshold` times the
fundamental must persist for t_e before an estimate appears, and the
estimate is cleared only after the peak stays below half the threshold for
t_e.  The component onset is back-dated by inverting the Hann coverage
growth between the first two above-threshold windows, which is exact for a
tone of any amplitude; publication additionally requires the latest
amplitude to sit within 90% of the episode peak, so impulsive or decaying
transients never publish no matter how large their first window reads.
Release times are back-dated from the design amplitude of twice the
threshold.
"""
from __future__ import annotations

import math

import numpy as np


def _hann_mass(c: float) -> float:
    """Hann mass fraction over a trailing window fraction c."""
    return c - math.sin(2 * math.pi * c) / (2 * math.pi)


def _coverage_for_mass(frac: float) -> float:
    """Trailing window fraction c whose Hann mass equals frac of total."""
    lo, hi = 0.0, 1.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if _hann_mass(mid) < frac:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


class SsfeState:
    """Streaming estimator state; feed samples with push, read with
    current_estimate.  Never raises on signal content; degraded input just
    yields no estimate."""

    def __init__(self, sample_rate: float = 5000.0, f1: float = 50.0,
                 t_e: float = 0.2, threshold: float = 0.05,
                 window: float = 0.2, hop: float = 0.02):
        if sample_rate < 10 * 2 * f1:
            raise ValueError("sample_rate must be at least 10x the band top")
        if not 0 < threshold < 1:
            raise ValueError("threshold must lie in (0,1)")
        self.sample_rate = float(sample_rate)
        self.f1 = float(f1)
        self.t_e = float(t_e)
        self.threshold = float(threshold)
        self.window = float(window)
        self.hop = float(hop)
        self.estimate: float | None = None
        self.trace: list[tuple[float, float | None]] = []

        self._lw = int(round(window * sample_rate))
        self._nhop = int(round(hop * sample_rate))
        n = np.arange(self._lw)
        self._hann = 0.5 - 0.5 * np.cos(2 * np.pi * n / self._lw)
        self._wsum = float(np.sum(self._hann))
        df = 1.0 / window
        # fundamental bin plus the band, with one neighbor each side
        k1 = int(round(f1 / df))
        self._df = df
        self._k1 = k1
        self._kband = [k for k in range(k1 + 1, 2 * k1)
                       if f1 + 2.0 < k * df < 2 * f1 - 2.0]
        ks = sorted({k1} | {k + d for k in self._kband for d in (-1, 0, 1)})
        self._ks = ks
        self._basis = np.exp(-2j * np.pi * np.outer(ks, n) * df / sample_rate)
        self._rect_f1 = np.exp(-2j * np.pi * f1 * n / sample_rate)
        self._tgrid = n / sample_rate

        self._buf = np.zeros(0)
        self._count = 0           # absolute samples received
        self._next_end = self._lw  # absolute index where the next hop window ends
        self._first: tuple[float, float, float | None] | None = None
        self._peak = 0.0
        self._prev_amp: float | None = None
        self._below: float | None = None

    # -- spectral helpers ---------------------------------------------------

    def _fund(self, x: np.ndarray) -> complex:
        return 2.0 * np.dot(self._rect_f1, x) / self._lw

    def _band_peak(self, x: np.ndarray):
        spec = self._basis @ (x * self._hann)
        amp = {k: 2.0 * abs(v) / self._wsum for k, v in zip(self._ks, spec)}
        kbest = max(self._kband, key=lambda k: amp[k])
        yl, yc, yr = (max(amp[kbest - 1], 1e-30), max(amp[kbest], 1e-30),
                      max(amp[kbest + 1], 1e-30))
        a, b, c = math.log(yl), math.log(yc), math.log(yr)
        den = a - 2 * b + c
        delta = 0.0 if den == 0 else 0.5 * (a - c) / den
        delta = min(0.5, max(-0.5, delta))
        peak = math.exp(b - 0.25 * (a - c) * delta)
        return (kbest + delta) * self._df, peak

    def _analyze(self, x: np.ndarray):
        a1 = self._fund(x)
        resid = x - (a1 * np.exp(2j * np.pi * self.f1 * self._tgrid)).real
        fp, amp = self._band_peak(resid)
        if amp > 0.25 * self.threshold * max(abs(a1), 1e-12):
            # clean pass: take the tone out, re-measure the fundamental
            at = 2.0 * np.dot(np.exp(-2j * np.pi * fp * self._tgrid),
                              resid * self._hann) / self._wsum
            tone = (at * np.exp(2j * np.pi * fp * self._tgrid)).real
            a1 = self._fund(x - tone)
            resid = x - (a1 * np.exp(2j * np.pi * self.f1 * self._tgrid)).real
            fp, amp = self._band_peak(resid)
        return abs(a1), fp, amp

    # -- state machine ------------------------------------------------------

    def _onset_coverage(self, r: float, h: float) -> float:
        """Tone coverage of the first above-threshold window, in seconds,
        inferred from the amplitude ratio r measured h windows later."""
        if r <= 1.0:
            # a fresh component whose growth stalled immediately: grant
            # only minimal history rather than guessing a coverage
            return self.hop
        lo, hi = 0.0, 1.0
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if _hann_mass(min(mid + h, 1.0)) >= r * _hann_mass(max(mid, 1e-9)):
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi) * self.window

    def _step(self, t: float, x: np.ndarray):
        fund, fp, amp = self._analyze(x)
        if fund < 1e-12:
            above, below_half, ratio = False, True, 0.0
        else:
            above = amp >= self.threshold * fund
            below_half = amp < 0.5 * self.threshold * fund
            ratio = min(1.0, amp / (2.0 * self.threshold * fund))
        # window fraction the component covers at the design amplitude
        cov = _coverage_for_mass(ratio) * self.window

        if self.estimate is None:
            if above:
                if self._first is None:
                    # classify the crossing from the pre-crossing window:
                    # no history means the tone may predate the stream, a
                    # comparable prior amplitude means a slow crossing of
                    # the threshold, anything else is a fresh component
                    # whose onset the growth inversion will place
                    if self._prev_amp is None:
                        back = self.window
                    elif self._prev_amp >= 0.8 * amp:
                        back = self.hop
                    else:
                        back = None
                    self._first = (t, amp, back)
                    self._peak = amp
                else:
                    t1, a1, back = self._first
                    if back is None:
                        back = self._onset_coverage(
                            amp / max(a1, 1e-30), (t - t1) / self.window)
                    self._peak = max(self._peak, amp)
                    if t - (t1 - back) >= self.t_e - 1e-9 and \
                            amp >= 0.9 * self._peak:
                        self.estimate = fp
            else:
                self._first = None
        else:
            if above:
                self.estimate = fp
            if below_half:
                if self._below is None:
                    self._below = t - (self.window - cov)
                if t - self._below >= self.t_e - 1e-9:
                    self.estimate = None
                    self._first = None
                    self._below = None
            else:
                self._below = None
        self._prev_amp = amp
        self.trace.append((t, self.estimate))

    def push(self, samples) -> "SsfeState":
        x = np.nan_to_num(np.asarray(samples, dtype=float),
                          nan=0.0, posinf=0.0, neginf=0.0)
        self._buf = np.concatenate([self._buf, x])
        self._count += len(x)
        while self._count >= self._next_end:
            start = self._next_end - self._lw
            off = start - (self._count - len(self._buf))
            segment = self._buf[off:off + self._lw]
            self._step(self._next_end / self.sample_rate, segment)
            self._next_end += self._nhop
        keep = self._count - (self._next_end - self._lw)
        if 0 <= keep < len(self._buf):
            self._buf = self._buf[len(self._buf) - keep:]
        return self

    def current_estimate(self) -> float | None:
        return self.estimate


def push(state: SsfeState, samples) -> SsfeState:
    return state.push(samples)


def current_estimate(state: SsfeState) -> float | None:
    return state.current_estimate()
