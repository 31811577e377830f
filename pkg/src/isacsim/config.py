"""Experiment configuration: a small strictly-validated INI dialect.

Five sections (scenario, training, evaluation, impairment, paths); every key
has a default matching the reference operating point, so an empty file is a
valid experiment.  Unknown sections or keys are errors: a typo must never
silently fall back to a default.  Angles are written in degrees and SNRs in
dB; conversion to radians / linear variances happens in to_scenario().
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, fields, replace

import numpy as np

from isacsim.arrays import ArrayGeometry
from isacsim.channels import ScenarioConfig
from isacsim.evaluation import EvalOptions
from isacsim.training import TrainingPlan


@dataclass(frozen=True)
class ScenarioSection:
    num_antennas: int = 16
    modulation_size: int = 4
    energy_budget: float = 1.0
    noise_psd: float = 1.0
    snr_r_db: float = 0.0
    snr_c_db: float = 20.0
    theta_min_deg: float = -20.0
    theta_max_deg: float = 20.0
    rx_theta_min_deg: float = 30.0
    rx_theta_max_deg: float = 50.0
    target_prior: float = 0.5
    wavelength: float = 1.0


@dataclass(frozen=True)
class TrainingSection:
    omega_r: float = 0.09
    batch_size: int = 10_000
    learning_rate: float = 0.01
    total_samples: int = 2_000_000
    stage_fractions: tuple = (1 / 3, 1 / 3, 1 / 3)
    seed: int = 0


@dataclass(frozen=True)
class EvaluationSection:
    n_trials: int = 300_000
    pfa_target: float = 0.01
    calibration_trials: int = 1_000_000


@dataclass(frozen=True)
class ImpairmentSection:
    sigma_lambda_fraction: float = 1 / 30
    geometry_seed: int = 77


@dataclass(frozen=True)
class PathsSection:
    checkpoint_dir: str = "runs"
    results_dir: str = "runs"


_SECTIONS = {
    "scenario": ScenarioSection,
    "training": TrainingSection,
    "evaluation": EvaluationSection,
    "impairment": ImpairmentSection,
    "paths": PathsSection,
}


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: ScenarioSection = field(default_factory=ScenarioSection)
    training: TrainingSection = field(default_factory=TrainingSection)
    evaluation: EvaluationSection = field(default_factory=EvaluationSection)
    impairment: ImpairmentSection = field(default_factory=ImpairmentSection)
    paths: PathsSection = field(default_factory=PathsSection)

    def to_scenario(self) -> ScenarioConfig:
        s = self.scenario
        return ScenarioConfig(
            num_antennas=s.num_antennas,
            modulation_size=s.modulation_size,
            energy_budget=s.energy_budget,
            noise_psd=s.noise_psd,
            radar_gain_var=s.noise_psd * 10.0 ** (s.snr_r_db / 10.0),
            comm_gain_var=s.noise_psd * 10.0 ** (s.snr_c_db / 10.0),
            target_angle_range=(np.deg2rad(s.theta_min_deg), np.deg2rad(s.theta_max_deg)),
            rx_angle_range=(np.deg2rad(s.rx_theta_min_deg), np.deg2rad(s.rx_theta_max_deg)),
            target_prior=s.target_prior,
        )

    def to_plan(self, omega_r: float | None = None, seed: int | None = None) -> TrainingPlan:
        t = self.training
        plan = TrainingPlan(
            omega_r=t.omega_r,
            batch_size=t.batch_size,
            learning_rate=t.learning_rate,
            total_samples=t.total_samples,
            stage_fractions=tuple(t.stage_fractions),
            seed=t.seed,
        )
        if omega_r is not None:
            plan = replace(plan, omega_r=omega_r)
        if seed is not None:
            plan = replace(plan, seed=seed)
        return plan

    def to_geometry(self) -> ArrayGeometry:
        return ArrayGeometry.nominal(self.scenario.num_antennas, self.scenario.wavelength)

    def eval_options(self, n_trials: int | None = None) -> EvalOptions:
        e = self.evaluation
        return EvalOptions(
            n_trials=n_trials if n_trials is not None else e.n_trials,
            target_pfa=e.pfa_target,
            calibration_trials=e.calibration_trials,
        )


def _parse_value(raw: str, default):
    if isinstance(default, tuple):
        parts = [p for p in raw.replace(",", " ").split() if p]
        return tuple(float(p) for p in parts)
    if isinstance(default, int):
        return int(raw)
    if isinstance(default, float):
        return float(raw)
    return raw


def load_config(path=None) -> ExperimentConfig:
    """Read an INI file; missing keys keep defaults, unknown keys are errors."""
    if path is None:
        return ExperimentConfig()
    parser = configparser.ConfigParser()
    with open(path) as fh:
        parser.read_file(fh)
    sections = {}
    for section_name in parser.sections():
        if section_name not in _SECTIONS:
            raise ValueError(f"{path}: unknown config section [{section_name}]")
        cls = _SECTIONS[section_name]
        known = {f.name: f for f in fields(cls)}
        values = {}
        for key, raw in parser.items(section_name):
            if key not in known:
                raise ValueError(f"{path}: unknown key '{key}' in section [{section_name}]")
            default = getattr(cls(), key)
            try:
                values[key] = _parse_value(raw, default)
            except ValueError as exc:
                raise ValueError(f"{path}: bad value for {section_name}.{key}: {raw!r}") from exc
        sections[section_name] = cls(**values)
    return ExperimentConfig(**sections)


def config_text(cfg: ExperimentConfig) -> str:
    """Render a config as INI text (round-trips through load_config)."""
    lines = []
    for section_name, section in (
        ("scenario", cfg.scenario),
        ("training", cfg.training),
        ("evaluation", cfg.evaluation),
        ("impairment", cfg.impairment),
        ("paths", cfg.paths),
    ):
        lines.append(f"[{section_name}]")
        for f in fields(section):
            value = getattr(section, f.name)
            if isinstance(value, tuple):
                value = ", ".join(f"{v!r}" for v in value)
            lines.append(f"{f.name} = {value}")
        lines.append("")
    return "\n".join(lines)
