"""
Parameters of the biorobots surrogate.

DesignParams are the six quantities under optimization. SimConstants hold
the simulator parameters that stay fixed during a study (defaults are the
unaltered PhysiCell values). TissueSettings collect the surrogate's own
choices (domain, diffusion, growth) that PhysiCell would otherwise supply.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, fields, replace
from typing import Dict, Sequence, Tuple

from src.core.exceptions import ConfigError, OutOfBoundsGenome
from src.core.search_space import SearchSpace, space_new


# (name, lo, hi, unit) in genome order
DESIGN_BOUNDS: Tuple[Tuple[str, float, float, str], ...] = (
    ("attached_migration_bias", 0.0, 1.0, ""),
    ("unattached_migration_bias", 0.0, 1.0, ""),
    ("worker_relative_adhesion", 0.0, 10.0, ""),
    ("worker_relative_repulsion", 0.0, 10.0, ""),
    ("worker_persistence_time", 0.0, 10.0, "min"),
    ("cargo_release_o2_threshold", 0.0, 20.0, "mmHg"),
)


def design_space() -> SearchSpace:
    return space_new(DESIGN_BOUNDS)


@dataclass(frozen=True)
class DesignParams:
    attached_migration_bias: float
    unattached_migration_bias: float
    worker_relative_adhesion: float
    worker_relative_repulsion: float
    worker_persistence_time: float
    cargo_release_o2_threshold: float

    def __post_init__(self):
        for name, lo, hi, _ in DESIGN_BOUNDS:
            value = getattr(self, name)
            if not lo <= value <= hi:
                raise OutOfBoundsGenome(f"{name}={value} outside [{lo}, {hi}]")

    @classmethod
    def field_names(cls) -> list[str]:
        return [f.name for f in fields(cls)]

    @classmethod
    def from_genome(cls, g: Sequence[float]) -> "DesignParams":
        values = [float(x) for x in g]
        if len(values) != len(DESIGN_BOUNDS):
            raise OutOfBoundsGenome(f"expected {len(DESIGN_BOUNDS)} design values, got {len(values)}")
        return cls(*values)

    def to_genome(self) -> list[float]:
        return [getattr(self, name) for name in self.field_names()]


@dataclass(frozen=True)
class SimConstants:
    """Unaltered simulator parameters (rates in 1/min, distances in µm)."""

    damage_rate: float = 0.03333
    repair_rate: float = 0.004167
    drug_death_rate: float = 0.004167
    elastic_coefficient: float = 0.05
    cargo_o2_relative_uptake: float = 0.1
    cargo_apoptosis_rate: float = 4.065e-5
    cargo_relative_adhesion: float = 0.0
    cargo_relative_repulsion: float = 5.0
    max_relative_adhesion_distance: float = 1.25
    max_elastic_displacement: float = 50.0
    max_attachment_distance: float = 18.0
    min_attachment_distance: float = 14.0
    motility_shutdown_threshold: float = 0.001
    attachment_receptor_threshold: float = 0.1
    worker_migration_speed: float = 2.0
    worker_apoptosis_rate: float = 0.0
    worker_o2_relative_uptake: float = 0.1

    def __post_init__(self):
        for f in fields(self):
            if getattr(self, f.name) < 0:
                raise ConfigError(f"{f.name} must be >= 0, got {getattr(self, f.name)}")
        if self.min_attachment_distance > self.max_attachment_distance:
            raise ConfigError("min_attachment_distance exceeds max_attachment_distance")

    def with_overrides(self, overrides: Dict[str, float]) -> "SimConstants":
        return replace(self, **_checked_overrides(self, overrides))

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class Schedule:
    """Phase durations and time steps, all in minutes; radii in µm."""

    growth_duration: float = 720.0
    treatment_duration: float = 360.0
    dt_diffusion: float = 0.2
    dt_mechanics: float = 6.0
    initial_tumor_radius: float = 200.0
    worker_count: int = 50
    cargo_count: int = 50
    # Multiplier on division, apoptosis and drug rates
    rate_scale: float = 12.0

    def __post_init__(self):
        if self.growth_duration < 0 or self.treatment_duration < 0:
            raise ConfigError("phase durations must be >= 0")
        if self.dt_diffusion <= 0 or self.dt_mechanics <= 0:
            raise ConfigError("time steps must be > 0")
        if self.dt_diffusion > self.dt_mechanics:
            raise ConfigError(
                f"dt_diffusion ({self.dt_diffusion}) must not exceed dt_mechanics ({self.dt_mechanics})"
            )
        if self.initial_tumor_radius < 0:
            raise ConfigError("initial_tumor_radius must be >= 0")
        if self.worker_count < 0 or self.cargo_count < 0:
            raise ConfigError("agent counts must be >= 0")
        if self.rate_scale <= 0:
            raise ConfigError("rate_scale must be > 0")

    @classmethod
    def desk(cls) -> "Schedule":
        """12 h growth + 6 h treatment with rates raised to match."""
        return cls()

    @classmethod
    def full(cls) -> "Schedule":
        """7 days growth + 3 days treatment at unscaled rates."""
        return cls(growth_duration=7 * 24 * 60.0, treatment_duration=3 * 24 * 60.0, rate_scale=1.0)

    @classmethod
    def preset(cls, name: str) -> "Schedule":
        presets = {"desk": cls.desk, "full": cls.full}
        if name not in presets:
            raise ConfigError(f"unknown preset {name!r}; choose one of {sorted(presets)}")
        return presets[name]()

    def with_overrides(self, overrides: Dict[str, float]) -> "Schedule":
        return replace(self, **_checked_overrides(self, overrides))

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class TissueSettings:
    """Surrogate choices with no counterpart in the fixed simulator parameters."""

    domain_size: float = 1000.0          # µm, square domain
    grid_spacing: float = 20.0           # µm
    far_field_o2: float = 38.0           # mmHg, Dirichlet boundary value
    hypoxia_threshold: float = 5.0       # mmHg, no division below
    o2_diffusion: float = 400.0          # µm²/min
    drug_diffusion: float = 100.0        # µm²/min
    cancer_o2_uptake: float = 0.1        # 1/min per cell in a voxel
    cell_spacing: float = 15.0           # µm, hex lattice pitch
    division_rate: float = 0.0006        # 1/min at far-field oxygen
    apoptosis_rate: float = 1e-5         # 1/min
    cell_radius: float = 7.5             # µm
    worker_radius: float = 3.0           # µm
    cargo_radius: float = 3.0            # µm
    cell_adhesion_strength: float = 0.4  # µm/min per unit relative adhesion
    cell_repulsion_strength: float = 2.0  # µm/min per unit relative repulsion
    cargo_dose: float = 1.0              # drug units deposited per released cargo
    cargo_receptor_level: float = 1.0    # receptor signal of an unreleased cargo
    injection_band: float = 40.0         # µm, width of the injection strip at the left edge
    tumor_margin: float = 40.0           # µm kept free between tumour and domain edge

    def __post_init__(self):
        for f in fields(self):
            if getattr(self, f.name) < 0:
                raise ConfigError(f"{f.name} must be >= 0, got {getattr(self, f.name)}")
        if self.grid_spacing <= 0 or self.domain_size <= 0 or self.cell_spacing <= 0:
            raise ConfigError("domain_size, grid_spacing and cell_spacing must be > 0")
        if self.hypoxia_threshold >= self.far_field_o2:
            raise ConfigError("hypoxia_threshold must be below far_field_o2")

    @property
    def grid_points(self) -> int:
        return max(1, int(round(self.domain_size / self.grid_spacing)))

    def max_stable_dt(self) -> float:
        """Largest explicit diffusion step that keeps the update a convex combination."""
        d_max = max(self.o2_diffusion, self.drug_diffusion)
        if d_max == 0:
            return float("inf")
        return self.grid_spacing ** 2 / (4.0 * d_max)

    def with_overrides(self, overrides: Dict[str, float]) -> "TissueSettings":
        return replace(self, **_checked_overrides(self, overrides))

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class SimulationSetup:
    """Everything a biorobots objective needs besides the design and the seed."""

    constants: SimConstants = field(default_factory=SimConstants)
    schedule: Schedule = field(default_factory=Schedule)
    tissue: TissueSettings = field(default_factory=TissueSettings)


def _checked_overrides(obj, overrides: Dict[str, float]) -> Dict[str, float]:
    known = {f.name: f for f in fields(obj)}
    unknown = sorted(set(overrides) - set(known))
    if unknown:
        raise ConfigError(f"unknown {type(obj).__name__} keys: {', '.join(unknown)}")
    return {k: (int(v) if known[k].type in ("int", int) else float(v)) for k, v in overrides.items()}
