//! Bi-objective traveling salesman with time windows (MO-TSPTW).
//!
//! Instance text format (UTF-8, `#` lines and blank lines ignored):
//!
//! ```text
//! n
//! n rows of n primary costs (travel times)
//! n rows of n secondary costs
//! n rows of "earliest latest"
//! ```
//!
//! City 0 is the depot. A tour starts at the depot, visits every other city
//! once and returns. Early arrival waits for the window to open; arriving
//! after the window closes counts one violation for that city. Both
//! objectives add [`PENALTY`] per violation.

use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};

use crate::problem::{Evaluation, Problem};
use crate::{Error, ObjectiveVector, Result, SearchRng};

/// Added to both objectives per violated window.
pub const PENALTY: f64 = 1e6;

/// Logit offset applied to the longest edge under biased sampling.
pub const BIAS_SCALE: f64 = -10.0;

#[derive(Debug, Clone, PartialEq)]
pub struct MoTsptwInstance {
    n: usize,
    cost1: Vec<f64>,
    cost2: Vec<f64>,
    windows: Vec<(f64, f64)>,
}

impl MoTsptwInstance {
    pub fn new(
        cost1: Vec<Vec<f64>>,
        cost2: Vec<Vec<f64>>,
        windows: Vec<(f64, f64)>,
    ) -> Result<Self> {
        let n = windows.len();
        if n == 0 {
            return Err(Error::InvalidConfig(
                "instance needs at least the depot".into(),
            ));
        }
        for (name, m) in [("primary", &cost1), ("secondary", &cost2)] {
            if m.len() != n || m.iter().any(|row| row.len() != n) {
                return Err(Error::InvalidConfig(format!(
                    "{name} cost matrix is not {n}x{n}"
                )));
            }
            for (i, row) in m.iter().enumerate() {
                if row.iter().any(|c| !c.is_finite() || *c < 0.0) {
                    return Err(Error::InvalidConfig(format!(
                        "{name} cost row {i} has a negative or non-finite entry"
                    )));
                }
                if row[i] != 0.0 {
                    return Err(Error::InvalidConfig(format!(
                        "{name} cost diagonal at {i} is not zero"
                    )));
                }
            }
        }
        for (i, &(e, l)) in windows.iter().enumerate() {
            if !(e.is_finite() && l.is_finite()) || e > l {
                return Err(Error::InvalidConfig(format!(
                    "window of city {i} is invalid: ({e}, {l})"
                )));
            }
        }
        Ok(Self {
            n,
            cost1: cost1.into_iter().flatten().collect(),
            cost2: cost2.into_iter().flatten().collect(),
            windows,
        })
    }

    /// Number of cities including the depot.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cost1(&self, from: usize, to: usize) -> f64 {
        self.cost1[from * self.n + to]
    }

    pub fn cost2(&self, from: usize, to: usize) -> f64 {
        self.cost2[from * self.n + to]
    }

    pub fn window(&self, city: usize) -> (f64, f64) {
        self.windows[city]
    }

    pub fn windows(&self) -> &[(f64, f64)] {
        &self.windows
    }

    pub fn max_cost1(&self) -> f64 {
        self.cost1.iter().copied().fold(0.0, f64::max)
    }

    fn rows(flat: &[f64], n: usize) -> Vec<Vec<f64>> {
        flat.chunks(n).map(<[f64]>::to_vec).collect()
    }

    /// Parses the bi-objective instance format.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = DataLines::new(text);
        let n = lines.header()?;
        let cost1 = lines.matrix(n, "primary cost")?;
        let cost2 = lines.matrix(n, "secondary cost")?;
        let windows = lines.windows(n)?;
        lines.finish()?;
        Self::new(cost1, cost2, windows).map_err(|e| Error::Parse {
            line: 0,
            msg: e.to_string(),
        })
    }

    /// Parses a classic single-objective TSPTW file (`n`, the cost matrix,
    /// then one `earliest latest` pair per city) and derives the secondary
    /// costs from `seed` with [`generate_secondary_costs`].
    pub fn parse_classic(text: &str, seed: u64) -> Result<Self> {
        let mut lines = DataLines::new(text);
        let n = lines.header()?;
        let cost1 = lines.matrix(n, "cost")?;
        let windows = lines.windows(n)?;
        lines.finish()?;
        let zeros = vec![vec![0.0; n]; n];
        let primary = Self::new(cost1, zeros, windows).map_err(|e| Error::Parse {
            line: 0,
            msg: e.to_string(),
        })?;
        Ok(generate_secondary_costs(&primary, seed))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    /// Serializes in the format accepted by [`MoTsptwInstance::parse`]; numbers
    /// use the shortest representation that reads back to the same value.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{}", self.n).unwrap();
        for flat in [&self.cost1, &self.cost2] {
            for row in flat.chunks(self.n) {
                let cells: Vec<String> = row.iter().map(f64::to_string).collect();
                writeln!(out, "{}", cells.join(" ")).unwrap();
            }
        }
        for (e, l) in &self.windows {
            writeln!(out, "{e} {l}").unwrap();
        }
        out
    }

    pub fn cost1_rows(&self) -> Vec<Vec<f64>> {
        Self::rows(&self.cost1, self.n)
    }

    pub fn cost2_rows(&self) -> Vec<Vec<f64>> {
        Self::rows(&self.cost2, self.n)
    }
}

/// Line reader that skips comments and reports 1-based line numbers.
struct DataLines<'a> {
    inner: std::iter::Peekable<std::iter::Enumerate<std::str::Lines<'a>>>,
    last_line: usize,
}

impl<'a> DataLines<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            inner: text.lines().enumerate().peekable(),
            last_line: 0,
        }
    }

    fn next_data(&mut self, what: &str) -> Result<(usize, &'a str)> {
        for (i, line) in self.inner.by_ref() {
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            self.last_line = i + 1;
            return Ok((i + 1, t));
        }
        Err(Error::Parse {
            line: self.last_line + 1,
            msg: format!("unexpected end of input, expected {what}"),
        })
    }

    fn numbers(&mut self, count: usize, what: &str) -> Result<(usize, Vec<f64>)> {
        let (line, text) = self.next_data(what)?;
        let values = text
            .split_whitespace()
            .map(|tok| {
                tok.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::Parse {
                        line,
                        msg: format!("invalid number {tok:?} in {what}"),
                    })
            })
            .collect::<Result<Vec<_>>>()?;
        if values.len() != count {
            return Err(Error::Parse {
                line,
                msg: format!("{what}: expected {count} values, found {}", values.len()),
            });
        }
        Ok((line, values))
    }

    fn header(&mut self) -> Result<usize> {
        let (line, text) = self.next_data("city count")?;
        text.parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| Error::Parse {
                line,
                msg: format!("invalid city count {text:?}"),
            })
    }

    fn matrix(&mut self, n: usize, what: &str) -> Result<Vec<Vec<f64>>> {
        (0..n)
            .map(|i| {
                let (line, row) = self.numbers(n, &format!("{what} row {i}"))?;
                if row.iter().any(|&c| c < 0.0) {
                    return Err(Error::Parse {
                        line,
                        msg: format!("negative entry in {what} row {i}"),
                    });
                }
                if row[i] != 0.0 {
                    return Err(Error::Parse {
                        line,
                        msg: format!("non-zero diagonal in {what} row {i}"),
                    });
                }
                Ok(row)
            })
            .collect()
    }

    fn windows(&mut self, n: usize) -> Result<Vec<(f64, f64)>> {
        (0..n)
            .map(|i| {
                let (line, w) = self.numbers(2, &format!("time window {i}"))?;
                if w[0] > w[1] {
                    return Err(Error::Parse {
                        line,
                        msg: format!(
                            "time window {i} opens after it closes ({} > {})",
                            w[0], w[1]
                        ),
                    });
                }
                Ok((w[0], w[1]))
            })
            .collect()
    }

    fn finish(&mut self) -> Result<()> {
        match self.next_data("") {
            Ok((line, _)) => Err(Error::Parse {
                line,
                msg: "unexpected trailing data".into(),
            }),
            Err(_) => Ok(()),
        }
    }
}

/// Replaces the secondary costs by Euclidean distances between fresh city
/// coordinates drawn uniformly from a square whose side is the largest
/// primary cost. Deterministic in `seed`.
pub fn generate_secondary_costs(instance: &MoTsptwInstance, seed: u64) -> MoTsptwInstance {
    let mut rng = SearchRng::seed_from_u64(seed);
    let side = instance.max_cost1().max(f64::MIN_POSITIVE);
    let coords: Vec<(f64, f64)> = (0..instance.n)
        .map(|_| (rng.gen_range(0.0..side), rng.gen_range(0.0..side)))
        .collect();
    let n = instance.n;
    let mut cost2 = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let (dx, dy) = (coords[i].0 - coords[j].0, coords[i].1 - coords[j].1);
                cost2[i * n + j] = dx.hypot(dy);
            }
        }
    }
    MoTsptwInstance {
        cost2,
        ..instance.clone()
    }
}

/// Number of nearest unvisited cities the hidden route chooses from.
const ROUTE_CANDIDATES: usize = 3;

/// Parameters of [`synthetic_instance`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticSpec {
    /// Cities including the depot.
    pub n: usize,
    /// Side of the square holding city coordinates.
    pub side: f64,
    /// Service time added to every edge leaving a non-depot city.
    pub service: f64,
    /// Window widths are drawn uniformly from this range.
    pub min_width: f64,
    pub max_width: f64,
    pub seed: u64,
}

/// A random instance in the style of the classic Solomon-derived TSPTW
/// benchmarks: Euclidean travel times plus service time, windows placed
/// around the arrival times of a hidden route that moves between nearby
/// cities (which is therefore feasible) and secondary costs from [`generate_secondary_costs`].
/// Costs are rounded to one decimal.
pub fn synthetic_instance(spec: SyntheticSpec) -> Result<MoTsptwInstance> {
    synthetic_instance_with_route(spec).map(|(inst, _)| inst)
}

/// [`synthetic_instance`] together with the hidden route (depot excluded)
/// that meets every window.
pub fn synthetic_instance_with_route(spec: SyntheticSpec) -> Result<(MoTsptwInstance, Vec<usize>)> {
    if spec.n == 0 || spec.min_width < 0.0 || spec.min_width > spec.max_width {
        return Err(Error::InvalidConfig(
            "invalid synthetic instance parameters".into(),
        ));
    }
    let mut rng = SearchRng::seed_from_u64(spec.seed);
    let n = spec.n;
    let round = |x: f64| (x * 10.0).round() / 10.0;
    let pts: Vec<(f64, f64)> = (0..n)
        .map(|_| (rng.gen_range(0.0..spec.side), rng.gen_range(0.0..spec.side)))
        .collect();
    let cost1: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        0.0
                    } else {
                        let service = if i == 0 { 0.0 } else { spec.service };
                        round((pts[i].0 - pts[j].0).hypot(pts[i].1 - pts[j].1) + service)
                    }
                })
                .collect()
        })
        .collect();

    // Route through the cities like a vehicle would: each step goes to one
    // of the few nearest unvisited cities.
    let mut hidden = Vec::with_capacity(n.saturating_sub(1));
    let mut unvisited: Vec<usize> = (1..n).collect();
    let mut at = 0;
    while !unvisited.is_empty() {
        unvisited.sort_by(|&a, &b| cost1[at][a].total_cmp(&cost1[at][b]).then(a.cmp(&b)));
        let pick = rng.gen_range(0..unvisited.len().min(ROUTE_CANDIDATES));
        at = unvisited.remove(pick);
        hidden.push(at);
    }
    let mut windows = vec![(0.0, 0.0); n];
    let (mut t, mut cur) = (0.0, 0);
    for &c in &hidden {
        t += cost1[cur][c];
        let width = rng.gen_range(spec.min_width..=spec.max_width);
        let before = rng.gen_range(0.0..=width);
        windows[c] = (
            round((t - before).max(0.0)).min(t),
            round(t - before + width).max(t),
        );
        cur = c;
    }
    t += cost1[cur][0];
    windows[0] = (0.0, round(t + spec.max_width).max(t));

    let primary = MoTsptwInstance::new(cost1, vec![vec![0.0; n]; n], windows)?;
    Ok((
        generate_secondary_costs(&primary, spec.seed ^ 0x5eed_c0de),
        hidden,
    ))
}

/// Partial tour: the depot is visited at the root.
#[derive(Debug, Clone, PartialEq)]
pub struct TourState {
    visited: Vec<bool>,
    n_visited: usize,
    current: usize,
    elapsed: f64,
    violations: u32,
    cost1: f64,
    cost2: f64,
    moves: Vec<usize>,
    closed: bool,
}

impl TourState {
    pub fn current(&self) -> usize {
        self.current
    }

    pub fn elapsed(&self) -> f64 {
        self.elapsed
    }

    pub fn violations(&self) -> u32 {
        self.violations
    }

    pub fn moves(&self) -> &[usize] {
        &self.moves
    }

    pub fn is_visited(&self, city: usize) -> bool {
        self.visited[city]
    }
}

/// [`MoTsptwInstance`] as a [`Problem`]: moves are city indices, codes are
/// directed edges `from * n + to`, and the bias favours short edges.
#[derive(Debug, Clone)]
pub struct MoTsptw {
    instance: MoTsptwInstance,
    check_depot_window: bool,
    max_cost: f64,
}

impl MoTsptw {
    pub fn new(instance: MoTsptwInstance) -> Self {
        let max_cost = instance.max_cost1();
        Self {
            instance,
            check_depot_window: true,
            max_cost,
        }
    }

    /// Whether returning to the depot after its window closes counts as a
    /// violation (default on).
    pub fn with_depot_window(mut self, check: bool) -> Self {
        self.check_depot_window = check;
        self
    }

    pub fn instance(&self) -> &MoTsptwInstance {
        &self.instance
    }

    /// Cities that may be visited next, ascending; the depot once every city
    /// has been visited.
    pub fn legal_cities(&self, state: &TourState) -> Vec<usize> {
        let mut out = Vec::new();
        self.legal_moves(state, &mut out);
        out
    }

    /// A state at `current` having visited exactly `visited` (plus the
    /// depot) at time `elapsed`. Intended for tests and diagnostics.
    pub fn state_at(&self, current: usize, visited: &[usize], elapsed: f64) -> TourState {
        let mut s = self.root();
        for &c in visited {
            s.visited[c] = true;
        }
        s.n_visited = 1 + visited.iter().filter(|&&c| c != 0).count();
        s.current = current;
        s.elapsed = elapsed;
        s
    }
}

impl Problem for MoTsptw {
    type State = TourState;
    type Move = usize;

    fn n_objectives(&self) -> usize {
        2
    }

    fn root(&self) -> TourState {
        let n = self.instance.n;
        let mut visited = vec![false; n];
        visited[0] = true;
        TourState {
            visited,
            n_visited: 1,
            current: 0,
            elapsed: 0.0,
            violations: 0,
            cost1: 0.0,
            cost2: 0.0,
            moves: Vec::with_capacity(n),
            closed: false,
        }
    }

    fn is_terminal(&self, state: &TourState) -> bool {
        state.closed
    }

    fn legal_moves(&self, state: &TourState, out: &mut Vec<usize>) {
        out.clear();
        if state.closed {
            return;
        }
        if state.n_visited == self.instance.n {
            out.push(0);
        } else {
            out.extend((1..self.instance.n).filter(|&c| !state.visited[c]));
        }
    }

    fn play(&self, state: &mut TourState, city: usize) -> Result<()> {
        let n = self.instance.n;
        let all_visited = state.n_visited == n;
        let legal = !state.closed
            && city < n
            && if city == 0 {
                all_visited
            } else {
                !state.visited[city]
            };
        if !legal {
            return Err(Error::IllegalMove {
                mv: city.to_string(),
                step: state.moves.len(),
            });
        }
        let arrival = state.elapsed + self.instance.cost1(state.current, city);
        let (open, close) = self.instance.window(city);
        if arrival > close && (city != 0 || self.check_depot_window) {
            state.violations += 1;
        }
        state.elapsed = arrival.max(open);
        state.cost1 += self.instance.cost1(state.current, city);
        state.cost2 += self.instance.cost2(state.current, city);
        if city == 0 {
            state.closed = true;
        } else {
            state.visited[city] = true;
            state.n_visited += 1;
        }
        state.current = city;
        state.moves.push(city);
        Ok(())
    }

    fn evaluate(&self, state: &TourState) -> Result<Evaluation> {
        if !state.closed {
            return Err(Error::NotTerminal);
        }
        let penalty = PENALTY * f64::from(state.violations);
        Ok(Evaluation {
            objectives: ObjectiveVector::new(vec![state.cost1 + penalty, state.cost2 + penalty])?,
            violations: state.violations,
        })
    }

    fn code(&self, state: &TourState, city: usize) -> u64 {
        (state.current * self.instance.n + city) as u64
    }

    fn bias(&self, state: &TourState, city: usize) -> f64 {
        if self.max_cost > 0.0 {
            BIAS_SCALE * self.instance.cost1(state.current, city) / self.max_cost
        } else {
            0.0
        }
    }
}
