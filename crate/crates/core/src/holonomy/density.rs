use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use std::sync::Arc;

use super::germ::{Germ, Letter, PolyGerm, PseudoGroup};
use crate::scalar::{cabs, Real};

/// Default letter budget of the probe.
pub const DEFAULT_BUDGET: usize = 50_000;

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeOptions<F> {
    /// Radius of the closed disk whose mesh is covered.
    pub radius: F,
    /// Mesh spacing; a mesh point counts as visited when an orbit point
    /// comes within this distance.
    pub epsilon: F,
    /// Total number of letter applications, split over `chunks` walks.
    pub budget: usize,
    pub chunks: usize,
    pub seed: u64,
    /// Starting points; walk `k` starts at `starts[k % len]`.
    pub starts: Vec<Complex<F>>,
}

impl<F: Real> ProbeOptions<F> {
    /// Four starting points at half the radius.
    pub fn new(radius: F, epsilon: F, budget: usize, seed: u64) -> Self {
        let starts = (0..4)
            .map(|k| Complex::from_polar(radius / F::lit(2.0), F::TAU() * F::lit(k as f64 / 4.0 + 0.1)))
            .collect();
        Self {
            radius,
            epsilon,
            budget,
            chunks: 16,
            seed,
            starts,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coverage<F> {
    pub budget: usize,
    pub epsilon: F,
    pub mesh_points: usize,
    pub visited: usize,
    pub coverage: f64,
    /// Letter applications rejected because they left the domain.
    pub rejected: usize,
}

struct Mesh<F> {
    half: i64,
    epsilon: F,
    inside: Vec<bool>,
    count: usize,
}

impl<F: Real> Mesh<F> {
    fn new(radius: F, epsilon: F) -> Self {
        let half = (radius / epsilon).floor().to_f64_lossy() as i64;
        let side = (2 * half + 1) as usize;
        let mut inside = vec![false; side * side];
        let mut count = 0;
        for i in -half..=half {
            for j in -half..=half {
                let p = Complex::new(epsilon * F::lit(i as f64), epsilon * F::lit(j as f64));
                if cabs(p) <= radius {
                    inside[((i + half) as usize) * side + (j + half) as usize] = true;
                    count += 1;
                }
            }
        }
        Self {
            half,
            epsilon,
            inside,
            count,
        }
    }

    fn side(&self) -> usize {
        (2 * self.half + 1) as usize
    }

    fn mark(&self, visited: &mut [bool], z: Complex<F>) {
        let e = self.epsilon;
        let ci = (z.re / e).to_f64_lossy();
        let cj = (z.im / e).to_f64_lossy();
        if !(ci.is_finite() && cj.is_finite()) {
            return;
        }
        let side = self.side();
        let lo_i = ((ci - 1.0).floor() as i64).max(-self.half);
        let hi_i = ((ci + 1.0).ceil() as i64).min(self.half);
        let lo_j = ((cj - 1.0).floor() as i64).max(-self.half);
        let hi_j = ((cj + 1.0).ceil() as i64).min(self.half);
        for i in lo_i..=hi_i {
            for j in lo_j..=hi_j {
                let idx = ((i + self.half) as usize) * side + (j + self.half) as usize;
                if !self.inside[idx] {
                    continue;
                }
                let p = Complex::new(e * F::lit(i as f64), e * F::lit(j as f64));
                if cabs(p - z) <= e {
                    visited[idx] = true;
                }
            }
        }
    }
}

/// Fraction of the `epsilon`-mesh of the closed `radius`-disk visited by
/// random pseudo-orbits. Walk `k` draws letters from its own ChaCha stream
/// and gets `ceil`-balanced share `(budget + chunks - 1 - k) / chunks` of the
/// budget, so a larger budget only extends each walk and coverage is
/// monotone in the budget. The union of walks does not depend on scheduling.
pub fn orbit_density_probe<F: Real>(group: &PseudoGroup<F>, opts: &ProbeOptions<F>) -> Coverage<F> {
    let mesh = Mesh::new(opts.radius, opts.epsilon);
    let letters: Vec<Letter> = (0..group.rank())
        .flat_map(|g| [Letter::new(g, false), Letter::new(g, true)])
        .collect();
    let chunks = opts.chunks.max(1);
    let walks: Vec<(Vec<bool>, usize)> = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut visited = vec![false; mesh.inside.len()];
            let mut rejected = 0;
            if opts.starts.is_empty() {
                return (visited, 0);
            }
            let mut z = opts.starts[k % opts.starts.len()];
            mesh.mark(&mut visited, z);
            let steps = (opts.budget + chunks - 1 - k) / chunks;
            if steps == 0 || letters.is_empty() {
                return (visited, 0);
            }
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(k as u64);
            for _ in 0..steps {
                let l = letters[rng.gen_range(0..letters.len())];
                match group.apply_letter_d(l, z) {
                    Ok((next, _)) => {
                        z = next;
                        mesh.mark(&mut visited, z);
                    }
                    Err(_) => rejected += 1,
                }
            }
            (visited, rejected)
        })
        .collect();
    let mut all = vec![false; mesh.inside.len()];
    let mut rejected = 0;
    for (v, r) in walks {
        for (a, b) in all.iter_mut().zip(v) {
            *a |= b;
        }
        rejected += r;
    }
    let visited = all.iter().filter(|&&b| b).count();
    Coverage {
        budget: opts.budget,
        epsilon: opts.epsilon,
        mesh_points: mesh.count,
        visited,
        coverage: visited as f64 / mesh.count.max(1) as f64,
        rejected,
    }
}

/// Generators `f_t(z) = t + a (z - t)` and `g(z) = b z` with
/// `a = e^{2 pi i lambda}`, `b = e^{2 pi i mu}`. For `t != 0` they do not
/// commute; with non-real `lambda`, `mu` of irrational real part the orbits
/// near the origin are dense.
pub fn translated_linear_pair<F: Real>(lambda: Complex<F>, mu: Complex<F>, t: Complex<F>, delta: F) -> PseudoGroup<F> {
    let two_pi_i = Complex::new(F::zero(), F::TAU());
    let a = (two_pi_i * lambda).exp();
    let b = (two_pi_i * mu).exp();
    let one = Complex::new(F::one(), F::zero());
    let f = PolyGerm::new(vec![t * (one - a), a], delta);
    let g = PolyGerm::linear(b, delta);
    let gens: Vec<Arc<dyn Germ<F>>> = vec![Arc::new(f), Arc::new(g)];
    PseudoGroup::new(gens, delta, "translated linear pair")
}

/// The pair used for the coverage target: `lambda = 0.2763 + 0.03i`,
/// `mu = 0.4142 - 0.02i`, `t = 0.05`, probed on the disk of radius 0.1 with
/// mesh 0.005.
pub fn reference_pair() -> (PseudoGroup<f64>, ProbeOptions<f64>) {
    let g = translated_linear_pair(
        Complex::new(0.2763, 0.03),
        Complex::new(0.4142, -0.02),
        Complex::new(0.05, 0.0),
        1.0,
    );
    (g, ProbeOptions::new(0.1, 0.005, DEFAULT_BUDGET, 1))
}
