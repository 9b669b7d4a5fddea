use num_complex::Complex;
use thiserror::Error;

use crate::scalar::{cabs, Real};

/// One piece of a path in the `v`-plane, parametrized by `s` in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Piece<F> {
    Segment { from: Complex<F>, to: Complex<F> },
    /// `center + radius * exp(i (start + s * sweep))`.
    Arc { center: Complex<F>, radius: F, start: F, sweep: F },
}

impl<F: Real> Piece<F> {
    pub fn point(&self, s: F) -> Complex<F> {
        match *self {
            Piece::Segment { from, to } => from + (to - from) * s,
            Piece::Arc {
                center,
                radius,
                start,
                sweep,
            } => center + Complex::from_polar(radius, start + s * sweep),
        }
    }

    pub fn velocity(&self, s: F) -> Complex<F> {
        match *self {
            Piece::Segment { from, to } => to - from,
            Piece::Arc {
                radius, start, sweep, ..
            } => Complex::from_polar(radius, start + s * sweep) * Complex::new(F::zero(), sweep),
        }
    }

    pub fn start(&self) -> Complex<F> {
        self.point(F::zero())
    }

    pub fn end(&self) -> Complex<F> {
        self.point(F::one())
    }

    pub fn reversed(&self) -> Self {
        match *self {
            Piece::Segment { from, to } => Piece::Segment { from: to, to: from },
            Piece::Arc {
                center,
                radius,
                start,
                sweep,
            } => Piece::Arc {
                center,
                radius,
                start: start + sweep,
                sweep: -sweep,
            },
        }
    }

    pub fn length(&self) -> F {
        match *self {
            Piece::Segment { from, to } => cabs(to - from),
            Piece::Arc { radius, sweep, .. } => radius * sweep.abs(),
        }
    }

    /// Euclidean distance from `p` to the piece.
    pub fn distance_to(&self, p: Complex<F>) -> F {
        match *self {
            Piece::Segment { from, to } => {
                let d = to - from;
                let len2 = d.norm_sqr();
                if len2 == F::zero() {
                    return cabs(p - from);
                }
                let w = p - from;
                let t = ((w.re * d.re + w.im * d.im) / len2).max(F::zero()).min(F::one());
                cabs(p - (from + d * t))
            }
            Piece::Arc {
                center,
                radius,
                start,
                sweep,
            } => {
                let w = p - center;
                let ends = cabs(p - self.start()).min(cabs(p - self.end()));
                if sweep.abs() >= F::TAU() {
                    return (cabs(w) - radius).abs();
                }
                if w.norm_sqr() == F::zero() {
                    return radius;
                }
                // is the angle of w inside the swept range?
                let (lo, span) = if sweep >= F::zero() {
                    (start, sweep)
                } else {
                    (start + sweep, -sweep)
                };
                let mut rel = (w.arg() - lo) % F::TAU();
                if rel < F::zero() {
                    rel = rel + F::TAU();
                }
                if rel <= span {
                    (cabs(w) - radius).abs()
                } else {
                    ends
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LoopError {
    #[error("no singular point to encircle")]
    Empty,
    #[error("connector of loop {index} passes within {distance} of singular point {other} (clearance {required})")]
    Clearance {
        index: usize,
        other: usize,
        distance: f64,
        required: f64,
    },
    #[error("base point lies inside the circle around singular point {0}")]
    BaseInsideCircle(usize),
}

/// Closed piecewise path in `L_inf` minus the singular set, in the `v`
/// coordinate of the `(1/x, y/x)` chart.
#[derive(Debug, Clone, PartialEq)]
pub struct LoopPath<F> {
    pub pieces: Vec<Piece<F>>,
    /// Index of the singular point encircled by a canonical loop.
    pub encircled: Option<usize>,
    /// Counterclockwise winding around `encircled`.
    pub winding: i32,
    /// Smallest distance to the singular points it was checked against.
    pub clearance: F,
}

impl<F: Real> LoopPath<F> {
    /// The constant path at `q`.
    pub fn trivial(q: Complex<F>) -> Self {
        Self {
            pieces: vec![Piece::Segment { from: q, to: q }],
            encircled: None,
            winding: 0,
            clearance: F::infinity(),
        }
    }

    pub fn from_pieces(pieces: Vec<Piece<F>>) -> Self {
        Self {
            pieces,
            encircled: None,
            winding: 0,
            clearance: F::infinity(),
        }
    }

    /// Full counterclockwise circle starting and ending at
    /// `center + radius * exp(i start)`.
    pub fn circle(center: Complex<F>, radius: F, start: F) -> Self {
        Self::from_pieces(vec![Piece::Arc {
            center,
            radius,
            start,
            sweep: F::TAU(),
        }])
    }

    pub fn base(&self) -> Complex<F> {
        self.pieces[0].start()
    }

    pub fn is_closed(&self, tol: F) -> bool {
        let a = self.base();
        let b = self.pieces[self.pieces.len() - 1].end();
        let connected = self.pieces.windows(2).all(|w| cabs(w[0].end() - w[1].start()) <= tol);
        connected && cabs(a - b) <= tol
    }

    pub fn reversed(&self) -> Self {
        Self {
            pieces: self.pieces.iter().rev().map(Piece::reversed).collect(),
            encircled: self.encircled,
            winding: -self.winding,
            clearance: self.clearance,
        }
    }

    /// `self` followed by `other`; the holonomy of the result is
    /// `h_other ∘ h_self`.
    pub fn then(&self, other: &Self) -> Self {
        let mut pieces = self.pieces.clone();
        pieces.extend(other.pieces.iter().copied());
        Self {
            pieces,
            encircled: None,
            winding: 0,
            clearance: self.clearance.min(other.clearance),
        }
    }

    pub fn distance_to(&self, p: Complex<F>) -> F {
        self.pieces
            .iter()
            .map(|piece| piece.distance_to(p))
            .fold(F::infinity(), |a, b| a.min(b))
    }

    pub fn with_clearance(mut self, points: &[Complex<F>]) -> Self {
        self.clearance = points.iter().map(|&p| self.distance_to(p)).fold(F::infinity(), F::min);
        self
    }
}

/// Radii of the canonical circles: half the distance to the nearest other
/// singular point, or `default` for a single point.
pub fn canonical_radii<F: Real>(points: &[Complex<F>], default: F) -> Vec<F> {
    points
        .iter()
        .enumerate()
        .map(|(j, &p)| {
            let nearest = points
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != j)
                .map(|(_, &o)| cabs(o - p))
                .fold(F::infinity(), F::min);
            if nearest.is_finite() {
                nearest / F::lit(2.0)
            } else {
                default
            }
        })
        .collect()
}

/// Canonical loop `alpha_j` based at `q`: the radial segment from `q` to the
/// circle of radius `radii[j]` around `points[j]`, one counterclockwise turn,
/// and the same segment back. Connectors must stay `margin * radii[k]` away
/// from every other circle.
pub fn canonical_loop<F: Real>(
    q: Complex<F>,
    points: &[Complex<F>],
    radii: &[F],
    j: usize,
    margin: F,
) -> Result<LoopPath<F>, LoopError> {
    let p = points[j];
    let r = radii[j];
    let to_q = q - p;
    if cabs(to_q) <= r {
        return Err(LoopError::BaseInsideCircle(j));
    }
    let angle = to_q.arg();
    let entry = p + Complex::from_polar(r, angle);
    let connector = Piece::Segment { from: q, to: entry };
    for (k, (&o, &rk)) in points.iter().zip(radii).enumerate() {
        if k == j {
            continue;
        }
        let d = connector.distance_to(o);
        if d < rk * (F::one() + margin) {
            return Err(LoopError::Clearance {
                index: j,
                other: k,
                distance: d.to_f64_lossy(),
                required: (rk * (F::one() + margin)).to_f64_lossy(),
            });
        }
    }
    let path = LoopPath {
        pieces: vec![
            connector,
            Piece::Arc {
                center: p,
                radius: r,
                start: angle,
                sweep: F::TAU(),
            },
            connector.reversed(),
        ],
        encircled: Some(j),
        winding: 1,
        clearance: F::infinity(),
    };
    Ok(path.with_clearance(points))
}

/// A base point from which every canonical connector is clear: the best of
/// 64 directions times 4 distances around the configuration, scored by the
/// worst relative clearance.
pub fn choose_base_point<F: Real>(points: &[Complex<F>], radii: &[F]) -> Result<Complex<F>, LoopError> {
    if points.is_empty() {
        return Err(LoopError::Empty);
    }
    let n = F::from_usize(points.len()).unwrap();
    let centroid = points.iter().fold(Complex::new(F::zero(), F::zero()), |a, &b| a + b) / n;
    let spread = points.iter().map(|&p| cabs(p - centroid)).fold(F::zero(), F::max);
    let rmax = radii.iter().copied().fold(F::zero(), F::max);
    let mut best: Option<(F, Complex<F>)> = None;
    for cand in 0..256 {
        let (k, scale) = (cand % 64, [1.0, 1.5, 2.5, 4.0][cand / 64]);
        let dist = (spread + F::lit(2.0) * rmax) * F::lit(scale);
        let theta = F::TAU() * F::lit(k as f64 / 64.0 + 0.0123);
        let q = centroid + Complex::from_polar(dist, theta);
        let mut score = F::infinity();
        for (j, (&p, &r)) in points.iter().zip(radii).enumerate() {
            let entry = p + Complex::from_polar(r, (q - p).arg());
            let seg = Piece::Segment { from: q, to: entry };
            for (k2, (&o, &rk)) in points.iter().zip(radii).enumerate() {
                if k2 != j {
                    score = score.min(seg.distance_to(o) / rk - F::one());
                }
            }
            score = score.min(cabs(q - p) / r - F::one());
        }
        if best.map_or(true, |(s, _)| score > s) {
            best = Some((score, q));
        }
    }
    Ok(best.unwrap().1)
}

/// Order in which the canonical loops based at `q` compose to a loop
/// encircling all points counterclockwise: increasing angle of `p_j - q`
/// measured from the direction of the centroid.
pub fn counterclockwise_order<F: Real>(q: Complex<F>, points: &[Complex<F>]) -> Vec<usize> {
    let n = F::from_usize(points.len().max(1)).unwrap();
    let centroid = points.iter().fold(Complex::new(F::zero(), F::zero()), |a, &b| a + b) / n;
    let dir = centroid - q;
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by(|&a, &b| {
        let ta = ((points[a] - q) / dir).arg();
        let tb = ((points[b] - q) / dir).arg();
        ta.partial_cmp(&tb).unwrap_or(std::cmp::Ordering::Equal)
    });
    idx
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn pieces_are_continuous_and_reversible() {
        let arc = Piece::Arc {
            center: c(1.0, 0.0),
            radius: 0.5,
            start: 0.3,
            sweep: 2.0,
        };
        let rev = arc.reversed();
        assert!((arc.start() - rev.end()).norm() < 1e-15);
        assert!((arc.point(0.25) - rev.point(0.75)).norm() < 1e-15);
        assert!((arc.velocity(0.25) + rev.velocity(0.75)).norm() < 1e-14);
        // numerical derivative
        let h = 1e-6;
        let fd = (arc.point(0.4 + h) - arc.point(0.4 - h)) / (2.0 * h);
        assert!((fd - arc.velocity(0.4)).norm() < 1e-8);
    }

    #[test]
    fn arc_distance() {
        let half = Piece::Arc {
            center: c(0.0, 0.0),
            radius: 1.0,
            start: 0.0,
            sweep: std::f64::consts::PI,
        };
        assert!((half.distance_to(c(0.0, 2.0)) - 1.0).abs() < 1e-14);
        assert!((half.distance_to(c(0.0, -1.0)) - 2f64.sqrt()).abs() < 1e-14);
        let seg = Piece::Segment {
            from: c(0.0, 0.0),
            to: c(2.0, 0.0),
        };
        assert!((seg.distance_to(c(1.0, 1.0)) - 1.0).abs() < 1e-15);
        assert!((seg.distance_to(c(3.0, 0.0)) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn canonical_loops_are_closed_and_clear() {
        let pts = [c(0.0, 0.0), c(2.0, 0.0), c(1.0, 1.5)];
        let radii = canonical_radii(&pts, 1.0);
        let q = choose_base_point(&pts, &radii).unwrap();
        for j in 0..3 {
            let l = canonical_loop(q, &pts, &radii, j, 0.0).unwrap();
            assert!(l.is_closed(1e-12));
            assert!(l.clearance >= radii.iter().copied().fold(f64::INFINITY, f64::min) * 0.99);
            assert!(l.reversed().is_closed(1e-12));
        }
        let mut order = counterclockwise_order(q, &pts);
        order.sort();
        assert_eq!(order, vec![0, 1, 2]);
    }
}
