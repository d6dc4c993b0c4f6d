//! Seeded generators for three desk-scale benchmark domains.
//!
//! - `delivery`: trucks moving packages over a random connected road map.
//!   No dead ends; long cheap detours exist, so depth-biased routines pay
//!   off in speed but hurt plan cost.
//! - `fuel-delivery`: delivery with a per-truck fuel counter and no
//!   refueling. Fuel is sized as (reference-route length x slack); slack near
//!   1 makes wasted drives fatal, so the state space is rich in dead ends
//!   that the delete relaxation largely cannot see.
//! - `grid-paint`: a robot paints all cells above the bottom row of a grid,
//!   painting only the cell directly above itself and never entering painted
//!   cells. Painting in the wrong order walls off unpainted cells.
//!
//! Identical [`GenSpec`]s produce byte-identical task files, and every
//! generated task is solvable by construction.

use std::collections::VecDeque;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use thiserror::Error;

use crate::sas;
use crate::task::{Operator, PartialAssignment, State, Task, Val, Var, VariableDef};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GenDomain {
    Delivery,
    FuelDelivery,
    GridPaint,
}

impl GenDomain {
    pub const ALL: [GenDomain; 3] =
        [GenDomain::Delivery, GenDomain::FuelDelivery, GenDomain::GridPaint];

    pub fn name(self) -> &'static str {
        match self {
            GenDomain::Delivery => "delivery",
            GenDomain::FuelDelivery => "fuel-delivery",
            GenDomain::GridPaint => "grid-paint",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|d| d.name() == name)
    }

    /// Documented size range per domain.
    pub fn size_range(self) -> (u32, u32) {
        match self {
            GenDomain::Delivery => (2, 48),
            GenDomain::FuelDelivery => (2, 32),
            GenDomain::GridPaint => (2, 12),
        }
    }
}

/// Parameters of one generated instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenSpec {
    pub domain: GenDomain,
    /// Single difficulty dial; see [`GenDomain::size_range`].
    pub size: u32,
    pub seed: u64,
    /// Fuel headroom factor, fuel-delivery only: fuel = ceil(need * slack).
    pub fuel_slack: f64,
}

impl GenSpec {
    pub fn new(domain: GenDomain, size: u32, seed: u64) -> Self {
        Self { domain, size, seed, fuel_slack: 1.5 }
    }

    pub fn with_fuel_slack(mut self, slack: f64) -> Self {
        self.fuel_slack = slack;
        self
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum GenError {
    #[error("{domain}: size {size} outside supported range {min}..={max}")]
    SizeOutOfRange { domain: &'static str, size: u32, min: u32, max: u32 },
    #[error("fuel slack {slack} outside supported range 1.0..=4.0")]
    SlackOutOfRange { slack: f64 },
}

/// Emits the instance as task-file contents.
pub fn generate(spec: &GenSpec) -> Result<String, GenError> {
    generate_task(spec).map(|t| sas::write_task(&t))
}

/// Builds the instance as an in-memory task.
pub fn generate_task(spec: &GenSpec) -> Result<Task, GenError> {
    let (min, max) = spec.domain.size_range();
    if spec.size < min || spec.size > max {
        return Err(GenError::SizeOutOfRange {
            domain: spec.domain.name(),
            size: spec.size,
            min,
            max,
        });
    }
    if !(1.0..=4.0).contains(&spec.fuel_slack) {
        return Err(GenError::SlackOutOfRange { slack: spec.fuel_slack });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let task = match spec.domain {
        GenDomain::Delivery => delivery(spec.size as usize, &mut rng),
        GenDomain::FuelDelivery => fuel_delivery(spec.size as usize, spec.fuel_slack, &mut rng),
        GenDomain::GridPaint => grid_paint(spec.size as usize, &mut rng),
    };
    Ok(task)
}

/// Stateless seed stream: instance k of a batch uses
/// `derive_seed(master, k)`.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    // splitmix64 over the xored pair
    let mut z = master ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn pa(entries: Vec<(Var, Val)>) -> PartialAssignment {
    PartialAssignment::new(entries).expect("generator emitted duplicate variable")
}

/// Connected undirected graph: a random spanning tree plus `extra` edges.
fn random_graph(
    locations: usize,
    extra: usize,
    weights: bool,
    rng: &mut ChaCha8Rng,
) -> Vec<(usize, usize, u32)> {
    let mut edges: Vec<(usize, usize, u32)> = Vec::new();
    for node in 1..locations {
        let parent = rng.gen_range(0..node);
        let w = if weights { rng.gen_range(1..=4) } else { 1 };
        edges.push((parent, node, w));
    }
    for _ in 0..extra {
        let a = rng.gen_range(0..locations);
        let b = rng.gen_range(0..locations);
        if a == b {
            continue;
        }
        let (a, b) = (a.min(b), a.max(b));
        if edges.iter().any(|&(x, y, _)| x == a && y == b) {
            continue;
        }
        let w = if weights { rng.gen_range(1..=4) } else { 1 };
        edges.push((a, b, w));
    }
    edges
}

fn hop_distances(locations: usize, edges: &[(usize, usize, u32)], from: usize) -> Vec<u32> {
    let mut adj = vec![Vec::new(); locations];
    for &(a, b, _) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut dist = vec![u32::MAX; locations];
    dist[from] = 0;
    let mut queue = VecDeque::from([from]);
    while let Some(x) = queue.pop_front() {
        for &y in &adj[x] {
            if dist[y] == u32::MAX {
                dist[y] = dist[x] + 1;
                queue.push_back(y);
            }
        }
    }
    dist
}

fn location_var(id: Var, name: String, locations: usize, in_trucks: usize) -> VariableDef {
    let mut value_names: Vec<String> = (0..locations).map(|l| format!("at-loc{l}")).collect();
    for k in 0..in_trucks {
        value_names.push(format!("in-truck{k}"));
    }
    VariableDef { id, name, domain_size: locations + in_trucks, value_names }
}

/// Package goals resampled until at least one package has to move.
fn package_goals(
    packages: &[Val],
    locations: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<Val> {
    loop {
        let goals: Vec<Val> =
            packages.iter().map(|_| rng.gen_range(0..locations) as Val).collect();
        if goals.iter().zip(packages).any(|(g, p)| g != p) {
            return goals;
        }
    }
}

fn delivery(size: usize, rng: &mut ChaCha8Rng) -> Task {
    let locations = size;
    let packages = (size / 2).max(1);
    let trucks = 1 + size / 8;
    let edges = random_graph(locations, size / 3, true, rng);

    let mut variables = Vec::new();
    for k in 0..trucks {
        variables.push(VariableDef {
            id: k,
            name: format!("truck{k}"),
            domain_size: locations,
            value_names: (0..locations).map(|l| format!("at-loc{l}")).collect(),
        });
    }
    for p in 0..packages {
        variables.push(location_var(trucks + p, format!("pkg{p}"), locations, trucks));
    }

    let mut operators = Vec::new();
    for k in 0..trucks {
        for &(a, b, w) in &edges {
            for (from, to) in [(a, b), (b, a)] {
                operators.push(Operator {
                    name: format!("drive truck{k} loc{from} loc{to}"),
                    precondition: pa(vec![(k, from as Val)]),
                    effect: pa(vec![(k, to as Val)]),
                    cost: w,
                });
            }
        }
    }
    for k in 0..trucks {
        for p in 0..packages {
            let pvar = trucks + p;
            let in_truck = (locations + k) as Val;
            for l in 0..locations {
                operators.push(Operator {
                    name: format!("pickup truck{k} pkg{p} loc{l}"),
                    precondition: pa(vec![(k, l as Val), (pvar, l as Val)]),
                    effect: pa(vec![(pvar, in_truck)]),
                    cost: 1,
                });
                operators.push(Operator {
                    name: format!("drop truck{k} pkg{p} loc{l}"),
                    precondition: pa(vec![(k, l as Val), (pvar, in_truck)]),
                    effect: pa(vec![(pvar, l as Val)]),
                    cost: 1,
                });
            }
        }
    }

    let truck_locs: Vec<Val> = (0..trucks).map(|_| rng.gen_range(0..locations) as Val).collect();
    let pkg_locs: Vec<Val> = (0..packages).map(|_| rng.gen_range(0..locations) as Val).collect();
    let goals = package_goals(&pkg_locs, locations, rng);

    let mut initial = truck_locs;
    initial.extend_from_slice(&pkg_locs);
    let goal: Vec<(Var, Val)> =
        goals.iter().enumerate().map(|(p, &g)| (trucks + p, g)).collect();

    Task::new(variables, operators, State::new(initial), pa(goal), true)
        .expect("delivery generator emitted an invalid task")
}

fn fuel_delivery(size: usize, slack: f64, rng: &mut ChaCha8Rng) -> Task {
    let locations = size;
    let packages = ((size + 2) / 3).max(1);
    let edges = random_graph(locations, size / 4, false, rng);

    let truck_loc = rng.gen_range(0..locations);
    let pkg_locs: Vec<Val> = (0..packages).map(|_| rng.gen_range(0..locations) as Val).collect();
    let goals = package_goals(&pkg_locs, locations, rng);

    // Reference route: serve packages in index order, measuring hops.
    let mut need: u32 = 0;
    let mut at = truck_loc;
    for p in 0..packages {
        let to_pkg = hop_distances(locations, &edges, at)[pkg_locs[p] as usize];
        let to_goal = hop_distances(locations, &edges, pkg_locs[p] as usize)[goals[p] as usize];
        need += to_pkg + to_goal;
        at = goals[p] as usize;
    }
    let fuel = ((f64::from(need) * slack).ceil() as u32).max(need).max(1);

    let mut variables = vec![
        VariableDef {
            id: 0,
            name: "truck0".into(),
            domain_size: locations,
            value_names: (0..locations).map(|l| format!("at-loc{l}")).collect(),
        },
        VariableDef {
            id: 1,
            name: "fuel0".into(),
            domain_size: fuel as usize + 1,
            value_names: (0..=fuel).map(|f| format!("fuel-{f}")).collect(),
        },
    ];
    for p in 0..packages {
        variables.push(location_var(2 + p, format!("pkg{p}"), locations, 1));
    }

    let mut operators = Vec::new();
    for &(a, b, _) in &edges {
        for (from, to) in [(a, b), (b, a)] {
            for f in 1..=fuel {
                operators.push(Operator {
                    name: format!("drive truck0 loc{from} loc{to} fuel{f}"),
                    precondition: pa(vec![(0, from as Val), (1, f as Val)]),
                    effect: pa(vec![(0, to as Val), (1, (f - 1) as Val)]),
                    cost: 1,
                });
            }
        }
    }
    let in_truck = locations as Val;
    for p in 0..packages {
        let pvar = 2 + p;
        for l in 0..locations {
            operators.push(Operator {
                name: format!("pickup truck0 pkg{p} loc{l}"),
                precondition: pa(vec![(0, l as Val), (pvar, l as Val)]),
                effect: pa(vec![(pvar, in_truck)]),
                cost: 1,
            });
            operators.push(Operator {
                name: format!("drop truck0 pkg{p} loc{l}"),
                precondition: pa(vec![(0, l as Val), (pvar, in_truck)]),
                effect: pa(vec![(pvar, l as Val)]),
                cost: 1,
            });
        }
    }

    let mut initial = vec![truck_loc as Val, fuel as Val];
    initial.extend_from_slice(&pkg_locs);
    let goal: Vec<(Var, Val)> = goals.iter().enumerate().map(|(p, &g)| (2 + p, g)).collect();

    Task::new(variables, operators, State::new(initial), pa(goal), true)
        .expect("fuel-delivery generator emitted an invalid task")
}

fn grid_paint(size: usize, rng: &mut ChaCha8Rng) -> Task {
    let width = size;
    let height = size;
    let cell = |r: usize, c: usize| r * width + c;
    // Cells above the bottom row are paintable; painted[i] tracks cell i of
    // rows 0..height-1.
    let paintable = width * (height - 1);
    let painted_var = |r: usize, c: usize| 1 + cell(r, c);

    let mut variables = vec![VariableDef {
        id: 0,
        name: "robot".into(),
        domain_size: width * height,
        value_names: (0..height)
            .flat_map(|r| (0..width).map(move |c| format!("at-{r}-{c}")))
            .collect(),
    }];
    for r in 0..height - 1 {
        for c in 0..width {
            variables.push(VariableDef {
                id: painted_var(r, c),
                name: format!("painted-{r}-{c}"),
                domain_size: 2,
                value_names: vec!["clear".into(), "painted".into()],
            });
        }
    }

    let mut operators = Vec::new();
    for r in 0..height {
        for c in 0..width {
            let from = cell(r, c) as Val;
            let neighbors = [
                (r.wrapping_sub(1), c),
                (r + 1, c),
                (r, c.wrapping_sub(1)),
                (r, c + 1),
            ];
            for (nr, nc) in neighbors {
                if nr >= height || nc >= width {
                    continue;
                }
                let mut pre = vec![(0, from)];
                if nr < height - 1 {
                    pre.push((painted_var(nr, nc), 0));
                }
                operators.push(Operator {
                    name: format!("move {r}-{c} {nr}-{nc}"),
                    precondition: pa(pre),
                    effect: pa(vec![(0, cell(nr, nc) as Val)]),
                    cost: 1,
                });
            }
        }
    }
    // Painting reaches only the cell directly above the robot.
    for r in 0..height - 1 {
        for c in 0..width {
            operators.push(Operator {
                name: format!("paint {r}-{c}"),
                precondition: pa(vec![(0, cell(r + 1, c) as Val), (painted_var(r, c), 0)]),
                effect: pa(vec![(painted_var(r, c), 1)]),
                cost: 1,
            });
        }
    }

    let start_col = rng.gen_range(0..width);
    let mut initial = vec![cell(height - 1, start_col) as Val];
    initial.extend(std::iter::repeat(0).take(paintable));

    // Each paintable cell is a goal with high probability; at least one is.
    let mut goal = Vec::new();
    for r in 0..height - 1 {
        for c in 0..width {
            if rng.gen_bool(0.8) {
                goal.push((painted_var(r, c), 1));
            }
        }
    }
    if goal.is_empty() {
        let r = rng.gen_range(0..height - 1);
        let c = rng.gen_range(0..width);
        goal.push((painted_var(r, c), 1));
    }

    Task::new(variables, operators, State::new(initial), pa(goal), true)
        .expect("grid-paint generator emitted an invalid task")
}
