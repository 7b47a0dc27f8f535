use crate::walkgraph::graph::{LatticeGraph, Polarization, StepOperator, Subsite};
use crate::walkgraph::state::WalkState;
use crate::walkgraph::GraphError;
use serde::{Deserialize, Serialize};

/// Site-resolved probabilities, indexed `2·cell + subsite`.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    pub step: usize,
    pub probs: Vec<f64>,
}

impl Distribution {
    pub fn cells(&self) -> usize {
        self.probs.len() / 2
    }

    pub fn prob(&self, cell: usize, subsite: Subsite) -> f64 {
        self.probs[2 * cell + subsite.index()]
    }

    pub fn cell_probs(&self) -> Vec<f64> {
        self.probs.chunks(2).map(|c| c[0] + c[1]).collect()
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Mass in cells `lo..=hi`, clipped to the chain.
    pub fn mass_in(&self, lo: isize, hi: isize) -> f64 {
        let lo = lo.max(0) as usize;
        let hi = hi.min(self.cells() as isize - 1);
        if hi < lo as isize {
            return 0.0;
        }
        self.probs[2 * lo..2 * (hi as usize + 1)].iter().sum()
    }

    /// Site position in cells: cell index plus the subsite offset.
    pub fn position(site: usize) -> f64 {
        let sub = if site.is_multiple_of(2) { Subsite::A } else { Subsite::B };
        (site / 2) as f64 + sub.offset()
    }

    pub fn mean_position(&self) -> f64 {
        let t = self.total();
        self.probs.iter().enumerate().map(|(i, p)| p * Self::position(i)).sum::<f64>() / t
    }

    pub fn std_dev(&self) -> f64 {
        let t = self.total();
        let m = self.mean_position();
        let var = self
            .probs
            .iter()
            .enumerate()
            .map(|(i, p)| p * (Self::position(i) - m).powi(2))
            .sum::<f64>()
            / t;
        var.max(0.0).sqrt()
    }

    /// Mass in the first and last `n` cells; nonzero means the wavefront
    /// has reached the chain ends.
    pub fn end_mass(&self, n: usize) -> f64 {
        let c = self.cells();
        let n = n.min(c);
        self.mass_in(0, n as isize - 1) + self.mass_in((c - n) as isize, c as isize - 1)
    }
}

/// Each edge's probability goes to the subsite whose diamond emitted it.
pub fn position_distribution(state: &WalkState, graph: &LatticeGraph) -> Distribution {
    let mut probs = vec![0.0; 2 * graph.cells()];
    for pol in Polarization::BOTH {
        for (t, a) in state.amplitudes(pol).iter().enumerate() {
            probs[graph.source_site(t)] += a.norm_sqr();
        }
    }
    Distribution { step: state.step(), probs }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

/// Ordinary least squares `y = slope·x + intercept`.
pub fn fit_line(xs: &[f64], ys: &[f64]) -> Result<LinearFit, GraphError> {
    let n = xs.len() as f64;
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(GraphError::Fit("need at least two paired points".into()));
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(GraphError::Fit("abscissa has zero variance".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs.iter().zip(ys).map(|(x, y)| (y - slope * x - intercept).powi(2)).sum();
    let ss_tot: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let r2 = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    Ok(LinearFit { slope, intercept, r2 })
}

/// Standard deviation of position at each history entry.
pub fn std_devs(history: &[Distribution]) -> Vec<f64> {
    history.iter().map(Distribution::std_dev).collect()
}

/// Slope (cells per step) and R² of std-dev against step.
pub fn spread_slope(history: &[Distribution]) -> Result<LinearFit, GraphError> {
    if history.len() < 10 {
        return Err(GraphError::Fit(format!("need at least 10 history entries, got {}", history.len())));
    }
    let xs: Vec<f64> = history.iter().map(|d| d.step as f64).collect();
    let ys = std_devs(history);
    if ys.iter().all(|&s| s == 0.0) {
        return Err(GraphError::Fit("distribution never spreads".into()));
    }
    fit_line(&xs, &ys)
}

/// Fit of std-dev against `√step`, the diffusive law.
pub fn sqrt_spread_fit(history: &[Distribution]) -> Result<LinearFit, GraphError> {
    let xs: Vec<f64> = history.iter().map(|d| (d.step as f64).sqrt()).collect();
    fit_line(&xs, &std_devs(history))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// Probability in cells strictly beyond `boundary` on `side`; the boundary
/// cell itself counts for neither side.
pub fn crossing_mass(dist: &Distribution, boundary: usize, side: Side) -> Result<f64, GraphError> {
    let c = dist.cells();
    if boundary == 0 || boundary + 1 >= c {
        return Err(GraphError::BoundaryNotInterior { boundary, cells: c });
    }
    Ok(match side {
        Side::Left => dist.mass_in(0, boundary as isize - 1),
        Side::Right => dist.mass_in(boundary as isize + 1, c as isize - 1),
    })
}

/// Probability within `±window` cells of the boundary, per history entry.
pub fn boundary_peak_mass(
    history: &[Distribution],
    boundary: usize,
    window: usize,
) -> Result<Vec<f64>, GraphError> {
    if window < 1 {
        return Err(GraphError::InvalidSpec("window must be at least 1".into()));
    }
    let (b, w) = (boundary as isize, window as isize);
    Ok(history.iter().map(|d| d.mass_in(b - w, b + w)).collect())
}

/// The same walk with probabilities in place of amplitudes: a Markov chain
/// on edges with transition weights `|S_ij|²`.
#[derive(Debug, Clone)]
pub struct ClassicalWalk {
    rows: Vec<[(u32, f64); 3]>,
}

impl ClassicalWalk {
    pub fn new(op: &StepOperator) -> Self {
        let rows = (0..op.dim())
            .map(|t| {
                let r = op.row(t);
                [(r[0].0, r[0].1.norm_sqr()), (r[1].0, r[1].1.norm_sqr()), (r[2].0, r[2].1.norm_sqr())]
            })
            .collect();
        ClassicalWalk { rows }
    }

    pub fn step(&self, p: &[f64]) -> Vec<f64> {
        self.rows.iter().map(|r| r.iter().map(|&(s, w)| w * p[s as usize]).sum()).collect()
    }

    /// History of site distributions from an edge-probability start vector.
    pub fn history(&self, graph: &LatticeGraph, start: Vec<f64>, steps: usize) -> Vec<Distribution> {
        let to_dist = |p: &[f64], step: usize| {
            let mut probs = vec![0.0; 2 * graph.cells()];
            for (t, x) in p.iter().enumerate() {
                probs[graph.source_site(t)] += x;
            }
            Distribution { step, probs }
        };
        let mut p = start;
        let mut out = vec![to_dist(&p, 0)];
        for s in 1..=steps {
            p = self.step(&p);
            out.push(to_dist(&p, s));
        }
        out
    }
}
