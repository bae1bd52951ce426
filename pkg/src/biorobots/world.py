"""
Biorobots world state and its time step

Desk-scale 2-D surrogate of the anti-cancer biorobots scenario:

- oxygen and drug live on a square grid with a one-voxel boundary ring
  (oxygen: Dirichlet at the far-field value, drug: Dirichlet at 0);
- cancer cells sit on a hexagonal lattice, divide into free neighbour
  sites when oxygenated and die from accumulated drug damage or apoptosis;
- workers seek cargo, drag it towards hypoxic tissue, and the cargo is
  released as a local drug deposit where oxygen falls below the threshold.

Cancer cells, workers and cargo draw from separate generators, and every
per-step draw is made for every live agent regardless of the rates in use,
so switching a rate to zero never shifts the random sequence of another
subsystem.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np
from scipy.spatial import cKDTree

from src.biorobots.parameters import DesignParams, Schedule, SimConstants, TissueSettings
from src.core.exceptions import ConfigError, DomainTooSmall, NumericalInstability
from src.core.rng import RngLike, as_generator


logger = logging.getLogger(__name__)

# Axial neighbour offsets of the hex lattice
HEX_NEIGHBOURS = np.array([(1, 0), (-1, 0), (0, 1), (0, -1), (1, -1), (-1, 1)], dtype=np.int64)
SQRT3_2 = math.sqrt(3.0) / 2.0

ALIVE = 0
DIED_DRUG = 1
DIED_APOPTOSIS = 2

NO_LINK = -1

# Relative tolerance on the oxygen range for floating-point rounding
O2_ROUNDING_SLACK = 1e-9


@dataclass
class BiorobotWorld:
    tissue: TissueSettings
    dt_diffusion: float
    rate_scale: float
    # Fields carry a one-voxel boundary ring: shape (n + 2, n + 2), indexed [x, y]
    oxygen: np.ndarray
    drug: np.ndarray
    # Cancer cells
    cell_site: np.ndarray      # (N, 2) axial lattice coordinates
    cell_pos: np.ndarray       # (N, 2) µm
    cell_damage: np.ndarray    # (N,)
    cell_fate: np.ndarray      # (N,) ALIVE / DIED_DRUG / DIED_APOPTOSIS
    occupancy: np.ndarray      # lattice -> cell index or NO_LINK
    site_valid: np.ndarray     # lattice sites inside the domain
    lattice_offset: np.ndarray  # (2,) added to axial coords to index occupancy
    # Workers
    worker_pos: np.ndarray = field(default_factory=lambda: np.zeros((0, 2)))
    worker_dir: np.ndarray = field(default_factory=lambda: np.zeros((0, 2)))
    worker_cargo: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    worker_alive: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=bool))
    # Cargo
    cargo_pos: np.ndarray = field(default_factory=lambda: np.zeros((0, 2)))
    cargo_worker: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    cargo_released: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=bool))
    clock: float = 0.0
    divisions: int = 0
    cancer_rng: Optional[np.random.Generator] = None
    worker_rng: Optional[np.random.Generator] = None

    # --- derived views ---

    @property
    def n(self) -> int:
        return self.oxygen.shape[0] - 2

    @property
    def cell_alive(self) -> np.ndarray:
        return self.cell_fate == ALIVE

    @property
    def live_cells(self) -> int:
        return int(np.count_nonzero(self.cell_fate == ALIVE))

    @property
    def cells_created(self) -> int:
        return int(self.cell_fate.size)

    @property
    def drug_deaths(self) -> int:
        return int(np.count_nonzero(self.cell_fate == DIED_DRUG))

    @property
    def apoptosis_deaths(self) -> int:
        return int(np.count_nonzero(self.cell_fate == DIED_APOPTOSIS))

    @property
    def released_cargo(self) -> int:
        return int(np.count_nonzero(self.cargo_released))

    def oxygen_interior(self) -> np.ndarray:
        return self.oxygen[1:-1, 1:-1]

    def voxel_index(self, pos: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Interior voxel (ix, iy) containing each position."""
        h = self.tissue.grid_spacing
        idx = np.floor(np.asarray(pos, dtype=np.float64) / h).astype(np.int64)
        idx = np.clip(idx, 0, self.n - 1)
        return idx[:, 0], idx[:, 1]

    # --- agent injection ---

    def add_workers(self, positions: Sequence[Sequence[float]], rng: RngLike) -> None:
        gen = as_generator(rng)
        pos = self._clip_to_domain(np.asarray(positions, dtype=np.float64).reshape(-1, 2))
        angles = gen.uniform(0.0, 2.0 * math.pi, len(pos))
        self.worker_pos = np.vstack([self.worker_pos, pos])
        self.worker_dir = np.vstack([self.worker_dir, np.column_stack([np.cos(angles), np.sin(angles)])])
        self.worker_cargo = np.concatenate([self.worker_cargo, np.full(len(pos), NO_LINK, dtype=np.int64)])
        self.worker_alive = np.concatenate([self.worker_alive, np.ones(len(pos), dtype=bool)])

    def add_cargo(self, positions: Sequence[Sequence[float]]) -> None:
        pos = self._clip_to_domain(np.asarray(positions, dtype=np.float64).reshape(-1, 2))
        self.cargo_pos = np.vstack([self.cargo_pos, pos])
        self.cargo_worker = np.concatenate([self.cargo_worker, np.full(len(pos), NO_LINK, dtype=np.int64)])
        self.cargo_released = np.concatenate([self.cargo_released, np.zeros(len(pos), dtype=bool)])

    def _clip_to_domain(self, pos: np.ndarray) -> np.ndarray:
        return np.clip(pos, 0.0, self.tissue.domain_size)


# --- construction ---

def lattice_position(site: np.ndarray, center: float, spacing: float) -> np.ndarray:
    site = np.asarray(site, dtype=np.float64).reshape(-1, 2)
    x = center + spacing * (site[:, 0] + 0.5 * site[:, 1])
    y = center + spacing * SQRT3_2 * site[:, 1]
    return np.column_stack([x, y])


def check_stability(schedule: Schedule, tissue: TissueSettings) -> None:
    limit = tissue.max_stable_dt()
    if schedule.dt_diffusion > limit:
        raise ConfigError(
            f"dt_diffusion={schedule.dt_diffusion} min exceeds the explicit stability limit "
            f"{limit:.4g} min (h={tissue.grid_spacing} µm, D={max(tissue.o2_diffusion, tissue.drug_diffusion)})"
        )


def world_init(schedule: Schedule, seed: RngLike, tissue: Optional[TissueSettings] = None,
               worker_seed: Optional[RngLike] = None) -> BiorobotWorld:
    """
    Pack the initial tumour into a disc at the domain centre and fill the
    oxygen grid with the far-field value. No workers or cargo yet.

    `seed` drives the cancer-cell stream; workers use `worker_seed` when
    given, else a stream spawned from the cancer generator.
    """
    tissue = tissue or TissueSettings()
    check_stability(schedule, tissue)

    L = tissue.domain_size
    center = L / 2.0
    radius = schedule.initial_tumor_radius
    if radius + tissue.tumor_margin > center:
        raise DomainTooSmall(
            f"tumour radius {radius} µm plus margin {tissue.tumor_margin} µm does not fit a {L} µm domain"
        )

    s = tissue.cell_spacing
    r_max = int(math.ceil(center / (s * SQRT3_2))) + 1
    q_max = int(math.ceil(L / s)) + r_max + 1
    qs, rs = np.meshgrid(np.arange(-q_max, q_max + 1), np.arange(-r_max, r_max + 1), indexing="ij")
    sites = np.column_stack([qs.ravel(), rs.ravel()])
    positions = lattice_position(sites, center, s)
    inside = np.all((positions >= 0.0) & (positions <= L), axis=1)
    site_valid = inside.reshape(qs.shape)
    offset = np.array([q_max, r_max], dtype=np.int64)

    dist = np.hypot(positions[:, 0] - center, positions[:, 1] - center)
    in_disc = inside & (dist <= radius + 1e-9)
    cell_site = sites[in_disc]
    cell_pos = positions[in_disc]

    occupancy = np.full(qs.shape, NO_LINK, dtype=np.int64)
    occupancy[cell_site[:, 0] + offset[0], cell_site[:, 1] + offset[1]] = np.arange(len(cell_site))

    n = tissue.grid_points
    oxygen = np.full((n + 2, n + 2), tissue.far_field_o2, dtype=np.float64)
    drug = np.zeros((n + 2, n + 2), dtype=np.float64)

    cancer_rng = as_generator(seed)
    worker_rng = as_generator(worker_seed) if worker_seed is not None else cancer_rng.spawn(1)[0]

    world = BiorobotWorld(
        tissue=tissue,
        dt_diffusion=schedule.dt_diffusion,
        rate_scale=schedule.rate_scale,
        oxygen=oxygen,
        drug=drug,
        cell_site=cell_site.astype(np.int64),
        cell_pos=cell_pos,
        cell_damage=np.zeros(len(cell_site)),
        cell_fate=np.full(len(cell_site), ALIVE, dtype=np.int8),
        occupancy=occupancy,
        site_valid=site_valid,
        lattice_offset=offset,
        cancer_rng=cancer_rng,
        worker_rng=worker_rng,
    )
    logger.debug("Initialised world: %d cells, %dx%d grid", world.live_cells, n, n)
    return world


# --- time step ---

def step(world: BiorobotWorld, design: DesignParams, consts: SimConstants, dt: float) -> BiorobotWorld:
    """Advance the world by one mechanics step of length dt (minutes). Updates in place and returns it."""
    if dt <= 0:
        raise ValueError(f"dt must be > 0, got {dt}")

    _diffuse(world, consts, dt)
    _update_cancer_cells(world, consts, dt)
    if world.worker_pos.shape[0] or world.cargo_pos.shape[0]:
        _move_agents(world, design, consts, dt)
        _attach(world, consts)
        _release(world, design)
        _worker_apoptosis(world, consts, dt)
    world.clock += dt
    _check_finite(world)
    return world


def _uptake_field(world: BiorobotWorld, consts: SimConstants) -> np.ndarray:
    tissue = world.tissue
    n = world.n
    k = np.zeros(n * n)

    alive = world.cell_fate == ALIVE
    if alive.any():
        ix, iy = world.voxel_index(world.cell_pos[alive])
        k += tissue.cancer_o2_uptake * np.bincount(ix * n + iy, minlength=n * n)

    if world.worker_alive.any():
        ix, iy = world.voxel_index(world.worker_pos[world.worker_alive])
        k += tissue.cancer_o2_uptake * consts.worker_o2_relative_uptake * np.bincount(ix * n + iy, minlength=n * n)

    active_cargo = ~world.cargo_released
    if active_cargo.any():
        ix, iy = world.voxel_index(world.cargo_pos[active_cargo])
        k += tissue.cancer_o2_uptake * consts.cargo_o2_relative_uptake * np.bincount(ix * n + iy, minlength=n * n)

    return k.reshape(n, n)


def _diffuse(world: BiorobotWorld, consts: SimConstants, dt: float) -> None:
    """
    Explicit diffusion with implicit linear sinks:
    c' = (c + dt*D/h^2 * lap(c)) / (1 + dt*k).
    With dt*D/h^2 <= 1/4 the numerator is a convex combination of
    neighbouring values, so fields stay inside [0, boundary value].
    """
    tissue = world.tissue
    h2 = tissue.grid_spacing ** 2
    substeps = max(1, int(math.ceil(dt / world.dt_diffusion - 1e-12)))
    sub_dt = dt / substeps

    k_o2 = _uptake_field(world, consts)
    o2_gain = sub_dt * tissue.o2_diffusion / h2
    o2_sink = 1.0 + sub_dt * k_o2

    drug_active = bool(np.any(world.drug))
    drug_gain = sub_dt * tissue.drug_diffusion / h2
    drug_sink = 1.0 + sub_dt * consts.cargo_apoptosis_rate * world.rate_scale

    far = tissue.far_field_o2
    slack = O2_ROUNDING_SLACK * max(far, 1.0)
    for _ in range(substeps):
        interior = (world.oxygen[1:-1, 1:-1] + o2_gain * _laplacian(world.oxygen)) / o2_sink
        low, high = interior.min(), interior.max()
        if low < -slack or high > far + slack:
            logger.error("Oxygen left [0, %g] at t=%.2f min: min %g, max %g", far, world.clock, low, high)
            raise NumericalInstability(
                f"oxygen left [0, {far}] mmHg at t={world.clock:.2f} min (min {low:.6g}, max {high:.6g})"
            )
        # within the slack the excursion is rounding only
        world.oxygen[1:-1, 1:-1] = np.clip(interior, 0.0, far)
        if drug_active:
            world.drug[1:-1, 1:-1] = (world.drug[1:-1, 1:-1] + drug_gain * _laplacian(world.drug)) / drug_sink
            np.maximum(world.drug[1:-1, 1:-1], 0.0, out=world.drug[1:-1, 1:-1])


def _laplacian(c: np.ndarray) -> np.ndarray:
    return c[2:, 1:-1] + c[:-2, 1:-1] + c[1:-1, 2:] + c[1:-1, :-2] - 4.0 * c[1:-1, 1:-1]


def _update_cancer_cells(world: BiorobotWorld, consts: SimConstants, dt: float) -> None:
    tissue = world.tissue
    rs = world.rate_scale
    idx = np.flatnonzero(world.cell_fate == ALIVE)
    gen = world.cancer_rng
    u_drug = gen.random(idx.size)
    u_apoptosis = gen.random(idx.size)
    u_divide = gen.random(idx.size)
    if idx.size == 0:
        return

    ix, iy = world.voxel_index(world.cell_pos[idx])
    o2 = world.oxygen[1:-1, 1:-1][ix, iy]
    exposure = world.drug[1:-1, 1:-1][ix, iy]

    damage = world.cell_damage[idx] + rs * (consts.damage_rate * exposure - consts.repair_rate) * dt
    world.cell_damage[idx] = np.maximum(damage, 0.0)

    p_drug = np.minimum(rs * consts.drug_death_rate * world.cell_damage[idx] * dt, 1.0)
    p_apoptosis = min(rs * tissue.apoptosis_rate * dt, 1.0)
    oxygenation = np.clip((o2 - tissue.hypoxia_threshold) / (tissue.far_field_o2 - tissue.hypoxia_threshold), 0.0, 1.0)
    p_divide = np.minimum(rs * tissue.division_rate * dt * oxygenation, 1.0)

    die_drug = u_drug < p_drug
    die_apoptosis = ~die_drug & (u_apoptosis < p_apoptosis)
    divide = ~die_drug & ~die_apoptosis & (u_divide < p_divide)

    dead = idx[die_drug | die_apoptosis]
    world.cell_fate[idx[die_drug]] = DIED_DRUG
    world.cell_fate[idx[die_apoptosis]] = DIED_APOPTOSIS
    if dead.size:
        sites = world.cell_site[dead] + world.lattice_offset
        world.occupancy[sites[:, 0], sites[:, 1]] = NO_LINK

    parents = idx[divide]
    if parents.size:
        _divide(world, parents)


def _divide(world: BiorobotWorld, parents: np.ndarray) -> None:
    gen = world.cancer_rng
    offset = world.lattice_offset
    shape = np.array(world.occupancy.shape)
    new_sites: List[np.ndarray] = []
    new_damage: List[float] = []
    next_index = world.cell_fate.size

    for parent in parents:
        candidates = world.cell_site[parent] + HEX_NEIGHBOURS + offset
        in_range = np.all((candidates >= 0) & (candidates < shape), axis=1)
        candidates = candidates[in_range]
        free = world.site_valid[candidates[:, 0], candidates[:, 1]] & (
            world.occupancy[candidates[:, 0], candidates[:, 1]] == NO_LINK
        )
        choices = candidates[free]
        if choices.shape[0] == 0:
            continue
        chosen = choices[gen.integers(choices.shape[0])]
        world.occupancy[chosen[0], chosen[1]] = next_index
        new_sites.append(chosen - offset)
        new_damage.append(world.cell_damage[parent])
        next_index += 1

    if not new_sites:
        return
    sites = np.array(new_sites, dtype=np.int64)
    center = world.tissue.domain_size / 2.0
    world.cell_site = np.vstack([world.cell_site, sites])
    world.cell_pos = np.vstack([world.cell_pos, lattice_position(sites, center, world.tissue.cell_spacing)])
    world.cell_damage = np.concatenate([world.cell_damage, np.array(new_damage)])
    world.cell_fate = np.concatenate([world.cell_fate, np.full(len(sites), ALIVE, dtype=np.int8)])
    world.divisions += len(sites)


def _unit(v: np.ndarray) -> np.ndarray:
    norm = np.linalg.norm(v, axis=1, keepdims=True)
    return np.divide(v, norm, out=np.zeros_like(v), where=norm > 1e-12)


def _move_agents(world: BiorobotWorld, design: DesignParams, consts: SimConstants, dt: float) -> None:
    gen = world.worker_rng
    W = world.worker_pos.shape[0]

    # Persistent direction: redraw with probability dt / persistence_time
    u_redraw = gen.random(W)
    angles = gen.uniform(0.0, 2.0 * math.pi, W)
    persistence = design.worker_persistence_time
    p_redraw = 1.0 if persistence <= 0 else min(dt / persistence, 1.0)
    redraw = u_redraw < p_redraw
    world.worker_dir[redraw] = np.column_stack([np.cos(angles[redraw]), np.sin(angles[redraw])])

    velocity = np.zeros_like(world.worker_pos)
    if W:
        grad_x, grad_y = np.gradient(world.oxygen_interior(), world.tissue.grid_spacing)
        ix, iy = world.voxel_index(world.worker_pos)
        up = _unit(np.column_stack([grad_x[ix, iy], grad_y[ix, iy]]))
        attached = world.worker_cargo != NO_LINK
        # Loaded workers head down the oxygen gradient, empty ones up it
        bias = np.where(attached, design.attached_migration_bias, design.unattached_migration_bias)[:, None]
        heading = np.where(attached[:, None], -up, up)
        motility = bias * heading + (1.0 - bias) * world.worker_dir
        stalled = np.linalg.norm(motility, axis=1) < consts.motility_shutdown_threshold
        motility[stalled] = 0.0
        velocity = consts.worker_migration_speed * motility
        velocity[~world.worker_alive] = 0.0

    force_w, force_c = _contact_velocities(world, design, consts)
    max_push = world.tissue.cell_radius / dt
    velocity = velocity + _cap(force_w, max_push)
    world.worker_pos = world._clip_to_domain(world.worker_pos + velocity * dt)

    free_cargo = ~world.cargo_released
    if free_cargo.any():
        cargo_velocity = _cap(force_c, max_push)
        cargo_velocity[~free_cargo] = 0.0
        world.cargo_pos = world._clip_to_domain(world.cargo_pos + cargo_velocity * dt)
        _follow_workers(world, consts, dt)


def _cap(v: np.ndarray, limit: float) -> np.ndarray:
    norm = np.linalg.norm(v, axis=1, keepdims=True)
    scale = np.minimum(1.0, np.divide(limit, norm, out=np.ones_like(norm), where=norm > limit))
    return v * scale


def _contact_velocities(world: BiorobotWorld, design: DesignParams,
                        consts: SimConstants) -> tuple[np.ndarray, np.ndarray]:
    """
    Pairwise adhesion/repulsion on workers and unreleased cargo.

    Repulsion acts while two bodies overlap, adhesion out to
    max_relative_adhesion_distance times the sum of radii; pair strengths are
    geometric means of the two bodies' relative coefficients (cancer cells
    have relative coefficients of 1).
    """
    tissue = world.tissue
    W = world.worker_pos.shape[0]
    C = world.cargo_pos.shape[0]
    force_w = np.zeros((W, 2))
    force_c = np.zeros((C, 2))

    live_cells = world.cell_fate == ALIVE
    live_workers = world.worker_alive
    active_cargo = ~world.cargo_released

    positions = np.vstack([world.worker_pos, world.cargo_pos, world.cell_pos[live_cells]])
    n_cells = int(np.count_nonzero(live_cells))
    radius = np.concatenate([
        np.full(W, tissue.worker_radius), np.full(C, tissue.cargo_radius), np.full(n_cells, tissue.cell_radius),
    ])
    adhesion = np.concatenate([
        np.full(W, design.worker_relative_adhesion), np.full(C, consts.cargo_relative_adhesion), np.ones(n_cells),
    ])
    repulsion = np.concatenate([
        np.full(W, design.worker_relative_repulsion), np.full(C, consts.cargo_relative_repulsion), np.ones(n_cells),
    ])
    present = np.concatenate([live_workers, active_cargo, np.ones(n_cells, dtype=bool)])

    mobile = np.flatnonzero(present[: W + C])
    if mobile.size == 0:
        return force_w, force_c
    bodies = np.flatnonzero(present)

    reach = consts.max_relative_adhesion_distance * (radius.max() + radius.max())
    pairs = cKDTree(positions[mobile]).sparse_distance_matrix(
        cKDTree(positions[bodies]), reach, output_type="ndarray"
    )
    if pairs.size == 0:
        return force_w, force_c

    i = mobile[pairs["i"]]
    j = bodies[pairs["j"]]
    keep = i != j
    i, j = i[keep], j[keep]
    order = np.lexsort((j, i))
    i, j = i[order], j[order]

    delta = positions[i] - positions[j]
    d = np.linalg.norm(delta, axis=1)
    contact = radius[i] + radius[j]
    adhesion_reach = consts.max_relative_adhesion_distance * contact
    direction = np.divide(delta, d[:, None], out=np.zeros_like(delta), where=d[:, None] > 1e-12)

    push = np.where(d < contact, (1.0 - d / contact) ** 2, 0.0)
    push *= tissue.cell_repulsion_strength * np.sqrt(repulsion[i] * repulsion[j])
    pull = np.where(d < adhesion_reach, (1.0 - d / adhesion_reach) ** 2, 0.0)
    pull *= tissue.cell_adhesion_strength * np.sqrt(adhesion[i] * adhesion[j])

    contribution = (push - pull)[:, None] * direction
    total = np.zeros((W + C, 2))
    np.add.at(total, i, contribution)
    force_w[:] = total[:W]
    force_c[:] = total[W:]
    return force_w, force_c


def _follow_workers(world: BiorobotWorld, consts: SimConstants, dt: float) -> None:
    """Attached cargo relaxes towards its worker; links stretched past the elastic limit break."""
    attached = np.flatnonzero(world.cargo_worker != NO_LINK)
    if attached.size == 0:
        return
    workers = world.cargo_worker[attached]
    pull = min(consts.elastic_coefficient * dt, 1.0)
    world.cargo_pos[attached] += pull * (world.worker_pos[workers] - world.cargo_pos[attached])

    gap = np.linalg.norm(world.worker_pos[workers] - world.cargo_pos[attached], axis=1)
    broken = gap > consts.max_elastic_displacement
    if broken.any():
        logger.debug("Detached %d cargo stretched past %.1f µm", int(broken.sum()), consts.max_elastic_displacement)
        world.worker_cargo[workers[broken]] = NO_LINK
        world.cargo_worker[attached[broken]] = NO_LINK


def _attach(world: BiorobotWorld, consts: SimConstants) -> None:
    if world.tissue.cargo_receptor_level < consts.attachment_receptor_threshold:
        return
    seekers = np.flatnonzero(world.worker_alive & (world.worker_cargo == NO_LINK))
    free = (world.cargo_worker == NO_LINK) & ~world.cargo_released
    if seekers.size == 0 or not free.any():
        return
    d = np.linalg.norm(world.worker_pos[seekers][:, None, :] - world.cargo_pos[None, :, :], axis=2)
    eligible = (d >= consts.min_attachment_distance) & (d <= consts.max_attachment_distance)
    for row, worker in enumerate(seekers):
        options = np.flatnonzero(eligible[row] & free)
        if options.size == 0:
            continue
        cargo = options[np.argmin(d[row, options])]
        world.worker_cargo[worker] = cargo
        world.cargo_worker[cargo] = worker
        free[cargo] = False


def _release(world: BiorobotWorld, design: DesignParams) -> None:
    loaded = np.flatnonzero(world.cargo_worker != NO_LINK)
    if loaded.size == 0:
        return
    ix, iy = world.voxel_index(world.cargo_pos[loaded])
    local_o2 = world.oxygen[1:-1, 1:-1][ix, iy]
    dropping = local_o2 < design.cargo_release_o2_threshold
    if not dropping.any():
        return
    cargo = loaded[dropping]
    np.add.at(world.drug[1:-1, 1:-1], (ix[dropping], iy[dropping]), world.tissue.cargo_dose)
    world.worker_cargo[world.cargo_worker[cargo]] = NO_LINK
    world.cargo_worker[cargo] = NO_LINK
    world.cargo_released[cargo] = True


def _worker_apoptosis(world: BiorobotWorld, consts: SimConstants, dt: float) -> None:
    u = world.worker_rng.random(world.worker_pos.shape[0])
    dying = world.worker_alive & (u < consts.worker_apoptosis_rate * dt)
    if not dying.any():
        return
    world.worker_alive[dying] = False
    carried = world.worker_cargo[dying]
    carried = carried[carried != NO_LINK]
    world.cargo_worker[carried] = NO_LINK
    world.worker_cargo[dying] = NO_LINK


def _check_finite(world: BiorobotWorld) -> None:
    for name in ("oxygen", "drug", "cell_damage", "worker_pos", "cargo_pos"):
        values = getattr(world, name)
        if not np.all(np.isfinite(values)):
            logger.error("Non-finite %s at t=%.2f min", name, world.clock)
            raise NumericalInstability(f"{name} became non-finite at t={world.clock:.2f} min")
