//! Standard polytope families and random rational hulls.

use rand::Rng;

use crate::linalg::{self, int, ratio, QMatrix, Rational};
use crate::polytope::{Point, Polytope};

fn unit(d: usize, i: usize, value: i64) -> Point {
    (0..d)
        .map(|k| if k == i { int(value) } else { int(0) })
        .collect()
}

pub fn point() -> Polytope {
    Polytope::new(0, vec![vec![]]).unwrap().with_name("point")
}

/// conv{0, e_1, …, e_d}.
pub fn simplex(d: usize) -> Polytope {
    let mut vertices = vec![vec![int(0); d]];
    vertices.extend((0..d).map(|i| unit(d, i, 1)));
    Polytope::new(d, vertices)
        .unwrap()
        .with_name(format!("simplex-{d}"))
}

/// {0,1}^d; vertex i has coordinate k equal to bit k of i.
pub fn hypercube(d: usize) -> Polytope {
    let vertices = (0..1usize << d)
        .map(|i| (0..d).map(|k| int(((i >> k) & 1) as i64)).collect())
        .collect();
    Polytope::new(d, vertices)
        .unwrap()
        .with_name(format!("cube-{d}"))
}

/// conv{±e_1, …, ±e_d}.
pub fn cross_polytope(d: usize) -> Polytope {
    let vertices = (0..d)
        .flat_map(|i| [unit(d, i, 1), unit(d, i, -1)])
        .collect();
    Polytope::new(d, vertices)
        .unwrap()
        .with_name(format!("cross-{d}"))
}

pub fn random_rational<R: Rng>(rng: &mut R, range: i64, max_den: i64) -> Rational {
    ratio(rng.gen_range(-range..=range), rng.gen_range(1..=max_den))
}

/// Hull of up to `max_points` random rational points in R^d, resampled until
/// the hull is full-dimensional.
pub fn random_hull<R: Rng>(rng: &mut R, d: usize, max_points: usize) -> Polytope {
    assert!(max_points > d, "need at least d + 1 points");
    loop {
        let count = rng.gen_range(d + 1..=max_points);
        let points = (0..count)
            .map(|_| (0..d).map(|_| random_rational(rng, 6, 3)).collect())
            .collect();
        if let Ok(p) = Polytope::hull(d, points) {
            return p.with_name(format!("random-{d}d-{}v", count));
        }
    }
}

/// A random invertible rational affine map `x ↦ M x + t`.
pub fn random_affine_map<R: Rng>(rng: &mut R, d: usize) -> (QMatrix, Vec<Rational>) {
    loop {
        let entries = (0..d * d).map(|_| random_rational(rng, 3, 2)).collect();
        let m = QMatrix::from_vec(d, d, entries);
        if linalg::rank(&m) == d {
            let t = (0..d).map(|_| random_rational(rng, 5, 3)).collect();
            return (m, t);
        }
    }
}
