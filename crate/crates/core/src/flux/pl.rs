use crate::{Error, Result};

/// Convex piecewise-linear flux through nodes `(u_i, f_i)`, extended affinely
/// beyond the first and last node.
#[derive(Debug, Clone, PartialEq)]
pub struct PlFlux {
    nodes: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
    /// Interior node indices where the slope strictly increases.
    kinks: Vec<usize>,
    /// Uniform spacing when the nodes are `jδ`.
    lattice: Option<f64>,
}

/// Relative slack on slope monotonicity and on node identification.
const NODE_RTOL: f64 = 1e-12;

impl PlFlux {
    pub fn new(nodes: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if nodes.len() < 2 || nodes.len() != values.len() {
            return Err(Error::InvalidFlux(format!(
                "need at least two nodes with values, got {} and {}",
                nodes.len(),
                values.len()
            )));
        }
        if nodes.iter().chain(&values).any(|v| !v.is_finite()) {
            return Err(Error::InvalidFlux("non-finite node".into()));
        }
        if nodes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidFlux("nodes must be strictly increasing".into()));
        }
        let slopes: Vec<f64> = nodes
            .windows(2)
            .zip(values.windows(2))
            .map(|(u, f)| (f[1] - f[0]) / (u[1] - u[0]))
            .collect();
        let scale = slopes.iter().fold(1.0f64, |m, s| m.max(s.abs()));
        let mut kinks = Vec::new();
        for (i, w) in slopes.windows(2).enumerate() {
            let jump = w[1] - w[0];
            if jump < -NODE_RTOL * scale {
                return Err(Error::NotConvex(format!(
                    "slope drops from {} to {} at u = {}",
                    w[0],
                    w[1],
                    nodes[i + 1]
                )));
            }
            if jump > NODE_RTOL * scale {
                kinks.push(i + 1);
            }
        }
        let lattice = detect_lattice(&nodes);
        Ok(Self { nodes, values, slopes, kinks, lattice })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Chord slopes `σ_i` between consecutive nodes.
    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    pub fn lattice_spacing(&self) -> Option<f64> {
        self.lattice
    }

    /// Nodes where the slope actually changes.
    pub fn kinks(&self) -> impl Iterator<Item = f64> + '_ {
        self.kinks.iter().map(|&i| self.nodes[i])
    }

    /// Kinks plus the two end nodes, with the matching slopes between them.
    pub(crate) fn reduced(&self) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let mut idx = vec![0];
        idx.extend(&self.kinks);
        idx.push(self.nodes.len() - 1);
        let u: Vec<f64> = idx.iter().map(|&i| self.nodes[i]).collect();
        let f: Vec<f64> = idx.iter().map(|&i| self.values[i]).collect();
        let s = idx.windows(2).map(|w| self.slopes[w[0]]).collect();
        (u, f, s)
    }

    fn piece(&self, u: f64) -> usize {
        self.nodes.partition_point(|&x| x <= u).saturating_sub(1).min(self.slopes.len() - 1)
    }

    pub fn eval(&self, u: f64) -> f64 {
        let k = self.piece(u);
        self.values[k] + self.slopes[k] * (u - self.nodes[k])
    }

    /// Right derivative.
    pub fn derivative(&self, u: f64) -> f64 {
        self.slopes[self.piece(u)]
    }

    /// Left derivative.
    pub fn derivative_left(&self, u: f64) -> f64 {
        let k = self.nodes.partition_point(|&x| x < u).saturating_sub(1).min(self.slopes.len() - 1);
        self.slopes[k]
    }

    /// Rankine–Hugoniot speed of a jump from `ul` to `ur`.
    pub fn chord(&self, ul: f64, ur: f64) -> f64 {
        if ul == ur {
            return self.derivative(ul);
        }
        (self.eval(ul) - self.eval(ur)) / (ul - ur)
    }

    fn tol(&self, u: f64) -> f64 {
        let span = self.nodes[self.nodes.len() - 1] - self.nodes[0];
        NODE_RTOL * span.max(u.abs())
    }

    /// Index of the node equal to `u` (up to rounding), if any.
    pub fn node_index(&self, u: f64) -> Option<usize> {
        let i = self.nodes.partition_point(|&x| x < u);
        let tol = self.tol(u);
        [i.checked_sub(1), Some(i)]
            .into_iter()
            .flatten()
            .filter(|&j| j < self.nodes.len())
            .find(|&j| (self.nodes[j] - u).abs() <= tol)
    }

    pub fn is_node(&self, u: f64) -> bool {
        self.node_index(u).is_some()
    }

    /// Nearest node value; on a uniform lattice the lattice is unbounded.
    pub fn snap(&self, u: f64) -> f64 {
        if let Some(d) = self.lattice {
            let v = (u / d).round() * d;
            return if v == 0.0 { 0.0 } else { v };
        }
        let i = self.nodes.partition_point(|&x| x < u);
        match (i.checked_sub(1), self.nodes.get(i)) {
            (Some(j), Some(&hi)) if u - self.nodes[j] <= hi - u => self.nodes[j],
            (_, Some(&hi)) => hi,
            (Some(j), None) => self.nodes[j],
            (None, None) => unreachable!("flux has at least two nodes"),
        }
    }

    /// Kinks strictly between `a` and `b` (in increasing order, `a < b`).
    pub fn kinks_between(&self, a: f64, b: f64) -> impl Iterator<Item = f64> + '_ {
        let (ta, tb) = (self.tol(a), self.tol(b));
        self.kinks().filter(move |&u| u - a > ta && b - u > tb)
    }

    /// Whether `a < b` lie in the same linear piece of the flux.
    pub fn same_piece(&self, a: f64, b: f64) -> bool {
        self.kinks_between(a, b).next().is_none()
    }

    /// Largest `|f'|` over `[lo, hi]`.
    pub fn lipschitz_on(&self, lo: f64, hi: f64) -> f64 {
        self.derivative_left(lo).abs().max(self.derivative(hi).abs()).max(self.derivative(lo).abs())
    }

    /// `f(0) = 0` and `0 ∈ ∂f(0)`.
    pub fn has_min_at_zero(&self) -> bool {
        self.eval(0.0).abs() <= self.tol(0.0) * (1.0 + self.slopes.iter().fold(0.0f64, |m, s| m.max(s.abs())))
            && self.derivative_left(0.0) <= 0.0
            && self.derivative(0.0) >= 0.0
    }
}

fn detect_lattice(nodes: &[f64]) -> Option<f64> {
    let d = nodes[1] - nodes[0];
    let tol = NODE_RTOL * d.max(1.0) * nodes.len() as f64;
    let on = nodes.iter().all(|&u| {
        let j = (u / d).round();
        (u - j * d).abs() <= tol
    });
    let uniform = nodes.windows(2).all(|w| ((w[1] - w[0]) - d).abs() <= tol);
    (on && uniform).then_some(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn burgers_pl(delta: f64, j: i32) -> PlFlux {
        let nodes: Vec<f64> = (-j..=j).map(|i| i as f64 * delta).collect();
        let values = nodes.iter().map(|u| 0.5 * u * u).collect();
        PlFlux::new(nodes, values).unwrap()
    }

    #[test]
    fn chord_slopes_of_burgers() {
        let f = burgers_pl(1.0, 2);
        assert_eq!(f.slopes(), &[-1.5, -0.5, 0.5, 1.5]);
        assert_eq!(f.kinks().collect::<Vec<_>>(), vec![-1.0, 0.0, 1.0]);
        assert_eq!(f.lattice_spacing(), Some(1.0));
        assert_eq!(f.eval(3.0), 2.0 + 1.5);
        assert_eq!(f.chord(1.0, 0.0), 0.5);
    }

    #[test]
    fn rejects_concave_nodes() {
        let r = PlFlux::new(vec![0.0, 1.0, 2.0], vec![0.0, 1.0, 1.5]);
        assert!(matches!(r, Err(Error::NotConvex(_))));
    }

    #[test]
    fn snapping_and_node_lookup() {
        let f = burgers_pl(0.25, 8);
        assert_eq!(f.snap(0.3), 0.25);
        assert_eq!(f.snap(-0.13), -0.25);
        assert_eq!(f.node_index(0.5), Some(10));
        assert_eq!(f.node_index(0.51), None);
        assert!(f.has_min_at_zero());
    }

    #[test]
    fn collinear_nodes_are_not_kinks() {
        let f = PlFlux::new(vec![-1.0, 0.0, 1.0, 2.0], vec![0.0, 0.0, 1.0, 2.0]).unwrap();
        assert_eq!(f.kinks().collect::<Vec<_>>(), vec![0.0]);
        assert!(f.same_piece(0.0, 2.0));
        assert!(!f.same_piece(-0.5, 0.5));
    }
}
