//! Cosine-substitution quadrature for densities with square-root endpoints.

use std::f64::consts::PI;

/// Nodes and `dx` weights of the midpoint rule in `theta` after substituting
/// `x = c + r cos(theta)` on `[lo, hi]`.
///
/// The `sin(theta)` Jacobian cancels the square-root edge behaviour of the
/// densities handled here, so the transformed integrand is smooth and
/// periodic and the rule converges geometrically. Nodes are ascending and
/// never touch the endpoints.
#[derive(Clone, Debug)]
pub struct CosineRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl CosineRule {
    pub fn new(lo: f64, hi: f64, n: usize) -> Self {
        assert!(n > 0 && hi > lo, "cosine rule needs n > 0 and lo < hi");
        let c = 0.5 * (lo + hi);
        let r = 0.5 * (hi - lo);
        let h = PI / n as f64;
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        // theta runs from pi down to 0 so x comes out ascending
        for j in (0..n).rev() {
            let theta = (j as f64 + 0.5) * h;
            nodes.push(c + r * theta.cos());
            weights.push(r * theta.sin() * h);
        }
        Self { nodes, weights }
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nodes_ascending_inside() {
        let rule = CosineRule::new(-1.0, 3.0, 64);
        assert!(rule.nodes.windows(2).all(|p| p[0] < p[1]));
        assert!(rule.nodes[0] > -1.0 && rule.nodes[63] < 3.0);
    }

    #[test]
    fn integrates_edge_singular_densities() {
        let rule = CosineRule::new(-2.0, 2.0, 200);
        let mass = rule.integrate(|x| (4.0 - x * x).sqrt() / (2.0 * PI));
        assert!((mass - 1.0).abs() < 1e-14);
        let arcsine = rule.integrate(|x| 1.0 / (PI * (4.0 - x * x).sqrt()));
        assert!((arcsine - 1.0).abs() < 1e-14);
    }
}
