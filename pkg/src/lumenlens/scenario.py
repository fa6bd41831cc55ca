"""Scenario configuration: room, LED grid, receiver, physics and control bounds.

Config files are YAML with angles in degrees; everything inside the package is
radians.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from functools import cached_property
from importlib import resources
from pathlib import Path

import numpy as np
import yaml

from .geometry import PdLayout, ReceiverPose
from .gsm import GsmConfig, SignalSet, build_signal_set
from .lenscontrol import ControlBounds
from .optics import LensState

__all__ = ["ConfigError", "ScenarioConfig", "load_config", "paper_defaults"]


class ConfigError(ValueError):
    """Raised for scenario parameters that cannot describe a physical setup."""


def _default_bounds() -> ControlBounds:
    return ControlBounds(
        f_min=0.01, f_max=0.15,
        theta_L_min=0.0, theta_L_max=2 * np.pi,
        phi_L_min=0.0, phi_L_max=np.deg2rad(30.0),
    )


@dataclass(frozen=True)
class ScenarioConfig:
    room: tuple = (5.0, 5.0, 3.5)
    n_t: int = 16
    d_tx: float = 0.5
    d_ts: float = 0.25
    led_height: float = 3.5
    rx_position: tuple = (2.5, 2.5, 1.0)
    n_r: int = 16
    d_rx: float = 0.005
    d_rs: float = 0.004
    d_len: float = 0.02
    half_power_angle: float = np.deg2rad(60.0)
    fov: float = np.deg2rad(90.0)
    k_eta: float = 0.1
    refractive_index: float = 1.5
    responsivity: float = 0.75
    eo_efficiency: float = 1.0
    noise_std: float = 1e-6
    mean_power: float = 1.0
    M: int = 2
    n_a: int = 2
    static_aperture_area: float | None = None
    bounds: ControlBounds = field(default_factory=_default_bounds)
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "room", tuple(float(v) for v in self.room))
        object.__setattr__(self, "rx_position", tuple(float(v) for v in self.rx_position))
        k = int(round(np.sqrt(self.n_t)))
        if k * k != self.n_t:
            raise ConfigError(f"n_t must be a perfect square, got {self.n_t}")
        extent = (k - 1) * self.d_tx + self.d_ts
        if extent > min(self.room[0], self.room[1]):
            raise ConfigError(
                f"LED grid of {self.n_t} LEDs at d_tx={self.d_tx} m spans {extent:.3f} m, "
                f"wider than the {self.room[0]} x {self.room[1]} m room"
            )
        if self.led_height <= self.rx_position[2] + self.d_len:
            raise ConfigError("LEDs must be above the lens")
        if not 1.0 < self.refractive_index:
            raise ConfigError(f"refractive_index must exceed 1, got {self.refractive_index}")
        if self.k_eta <= 0 or self.noise_std <= 0 or self.d_len <= 0:
            raise ConfigError("k_eta, noise_std and d_len must be positive")
        # PdLayout and GsmConfig validate themselves
        try:
            self.pd_layout
            self.gsm
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def replace(self, **changes) -> "ScenarioConfig":
        return dataclasses.replace(self, **changes)

    @property
    def lambertian_order(self) -> float:
        return -np.log(2.0) / np.log(np.cos(self.half_power_angle))

    @cached_property
    def pd_layout(self) -> PdLayout:
        return PdLayout(self.n_r, self.d_rx, self.d_rs)

    @cached_property
    def gsm(self) -> GsmConfig:
        return GsmConfig(
            n_t=self.n_t, n_a=self.n_a, M=self.M, mean_power=self.mean_power,
            eo_efficiency=self.eo_efficiency, responsivity=self.responsivity,
            noise_std=self.noise_std,
        )

    @cached_property
    def signal_set(self) -> SignalSet:
        return build_signal_set(self.gsm)

    @cached_property
    def led_centers(self) -> np.ndarray:
        """(n_t, 3) LED centres, row-major grid centred under the room centre."""
        k = int(round(np.sqrt(self.n_t)))
        idx = np.arange(self.n_t)
        off = (k - 1) / 2.0
        x = self.room[0] / 2 + (idx % k - off) * self.d_tx
        y = self.room[1] / 2 + (idx // k - off) * self.d_tx
        return np.column_stack([x, y, np.full(self.n_t, self.led_height)])

    @cached_property
    def led_vertices(self) -> np.ndarray:
        """(n_t, 4, 3) LED corners in A, B, C, D order."""
        h = self.d_ts / 2.0
        offsets = np.array([[-h, -h, 0.0], [-h, h, 0.0], [h, h, 0.0], [h, -h, 0.0]])
        return self.led_centers[:, None, :] + offsets[None, :, :]

    def pose(self, theta_R: float = 0.0, phi_R: float = 0.0, position=None) -> ReceiverPose:
        pos = self.rx_position if position is None else position
        return ReceiverPose(np.asarray(pos, dtype=float), theta_R, phi_R)

    def lens(self, f: float, theta_L: float = 0.0, phi_L: float = 0.0,
             aperture_area: float | None = None) -> LensState:
        return LensState(
            f=f, theta_L=theta_L, phi_L=phi_L, d_len=self.d_len, k_eta=self.k_eta,
            n_l=self.refractive_index, aperture_area=aperture_area,
        )

    @classmethod
    def from_dict(cls, d: dict) -> "ScenarioConfig":
        leds = d.get("leds", {})
        rx = d.get("receiver", {})
        ph = d.get("physics", {})
        gsm = d.get("gsm", {})
        b = d.get("bounds", {})
        base = cls()
        bb = base.bounds
        deg = np.deg2rad
        bounds = ControlBounds(
            f_min=float(b.get("f_min", bb.f_min)),
            f_max=float(b.get("f_max", bb.f_max)),
            theta_L_min=deg(float(b["theta_L_min"])) if "theta_L_min" in b else bb.theta_L_min,
            theta_L_max=deg(float(b["theta_L_max"])) if "theta_L_max" in b else bb.theta_L_max,
            phi_L_min=deg(float(b["phi_L_min"])) if "phi_L_min" in b else bb.phi_L_min,
            phi_L_max=deg(float(b["phi_L_max"])) if "phi_L_max" in b else bb.phi_L_max,
            n_f=int(b.get("n_f", bb.n_f)),
            n_theta=int(b.get("n_theta", bb.n_theta)),
            n_phi=int(b.get("n_phi", bb.n_phi)),
        )
        static_area = d.get("static_aperture_area", base.static_aperture_area)
        return cls(
            room=tuple(d.get("room", base.room)),
            n_t=int(leds.get("n_t", base.n_t)),
            d_tx=float(leds.get("d_tx", base.d_tx)),
            d_ts=float(leds.get("d_ts", base.d_ts)),
            led_height=float(leds.get("height", base.led_height)),
            rx_position=tuple(rx.get("position", base.rx_position)),
            n_r=int(rx.get("n_r", base.n_r)),
            d_rx=float(rx.get("d_rx", base.d_rx)),
            d_rs=float(rx.get("d_rs", base.d_rs)),
            d_len=float(rx.get("d_len", base.d_len)),
            half_power_angle=deg(float(ph.get("half_power_angle", 60.0))),
            fov=deg(float(ph.get("fov", 90.0))),
            k_eta=float(ph.get("k_eta", base.k_eta)),
            refractive_index=float(ph.get("refractive_index", base.refractive_index)),
            responsivity=float(ph.get("responsivity", base.responsivity)),
            eo_efficiency=float(ph.get("eo_efficiency", base.eo_efficiency)),
            noise_std=float(ph.get("noise_std", base.noise_std)),
            mean_power=float(ph.get("mean_power", base.mean_power)),
            M=int(gsm.get("M", base.M)),
            n_a=int(gsm.get("n_a", base.n_a)),
            static_aperture_area=None if static_area is None else float(static_area),
            bounds=bounds,
            seed=int(d.get("seed", base.seed)),
        )

    def to_dict(self) -> dict:
        deg = lambda v: float(np.rad2deg(v))  # noqa: E731
        b = self.bounds
        return {
            "room": list(self.room),
            "leds": {"n_t": self.n_t, "d_tx": self.d_tx, "d_ts": self.d_ts, "height": self.led_height},
            "receiver": {"position": list(self.rx_position), "n_r": self.n_r, "d_rx": self.d_rx,
                         "d_rs": self.d_rs, "d_len": self.d_len},
            "physics": {"half_power_angle": deg(self.half_power_angle), "fov": deg(self.fov),
                        "k_eta": self.k_eta, "refractive_index": self.refractive_index,
                        "responsivity": self.responsivity, "eo_efficiency": self.eo_efficiency,
                        "noise_std": self.noise_std, "mean_power": self.mean_power},
            "gsm": {"M": self.M, "n_a": self.n_a},
            "static_aperture_area": self.static_aperture_area,
            "bounds": {"f_min": b.f_min, "f_max": b.f_max,
                       "theta_L_min": deg(b.theta_L_min), "theta_L_max": deg(b.theta_L_max),
                       "phi_L_min": deg(b.phi_L_min), "phi_L_max": deg(b.phi_L_max),
                       "n_f": b.n_f, "n_theta": b.n_theta, "n_phi": b.n_phi},
            "seed": self.seed,
        }


def load_config(path) -> ScenarioConfig:
    """Read a YAML scenario file."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return ScenarioConfig.from_dict(yaml.safe_load(text) or {})


def paper_defaults() -> ScenarioConfig:
    """The shipped default scenario (``data/paper_defaults.yaml``)."""
    text = resources.files("lumenlens").joinpath("data/paper_defaults.yaml").read_text()
    return ScenarioConfig.from_dict(yaml.safe_load(text))
