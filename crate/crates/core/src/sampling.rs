//! Deterministic sample sets: tensor grids, Halton sequences, shells and
//! seeded pseudo-random draws.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::scalar::{lin_grid, norm, Real};

const PRIMES: [u32; 3] = [2, 3, 5];

/// Uniform tensor grid on `[-half_width, half_width]^dim`.
pub fn grid_points<T: Real>(dim: usize, half_width: T, per_axis: usize) -> Vec<Vec<T>> {
    let axis = lin_grid(-half_width, half_width, per_axis);
    let mut out: Vec<Vec<T>> = vec![Vec::new()];
    for _ in 0..dim {
        out = out
            .into_iter()
            .flat_map(|p| {
                axis.iter().map(move |&a| {
                    let mut q = p.clone();
                    q.push(a);
                    q
                })
            })
            .collect();
    }
    out
}

fn radical_inverse(mut i: u64, base: u32) -> f64 {
    let b = base as f64;
    let mut inv = 1.0 / b;
    let mut out = 0.0;
    while i > 0 {
        out += (i % base as u64) as f64 * inv;
        i /= base as u64;
        inv /= b;
    }
    out
}

/// Halton points in `[0, 1)^dim` (dim <= 3), starting at index `seed + 1`.
pub fn halton_unit<T: Real>(dim: usize, n: usize, seed: u64) -> Vec<Vec<T>> {
    assert!(dim <= PRIMES.len(), "Halton sampling supports d <= 3");
    (0..n as u64).map(|i| PRIMES[..dim].iter().map(|&p| T::lit(radical_inverse(seed + i + 1, p))).collect()).collect()
}

/// Halton points in the box `[-half_width, half_width]^dim`.
pub fn halton_box<T: Real>(dim: usize, half_width: T, n: usize, seed: u64) -> Vec<Vec<T>> {
    let two = T::lit(2.0);
    halton_unit::<T>(dim, n, seed).into_iter().map(|p| p.into_iter().map(|u| (two * u - T::one()) * half_width).collect()).collect()
}

/// `n` Halton points inside the closed ball of the given radius (box
/// rejection, so deterministic for a fixed seed).
pub fn halton_ball<T: Real>(dim: usize, radius: T, n: usize, seed: u64) -> Vec<Vec<T>> {
    let mut out = Vec::with_capacity(n);
    let mut start = seed;
    while out.len() < n {
        let batch = halton_box(dim, radius, 2 * (n - out.len()) + 8, start);
        start += batch.len() as u64;
        out.extend(batch.into_iter().filter(|p| norm(p) <= radius).take(n - out.len()));
    }
    out
}

/// Seeded uniform points in the box `[-half_width, half_width]^dim`.
pub fn random_box<T: Real>(dim: usize, half_width: T, n: usize, seed: u64) -> Vec<Vec<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = half_width.as_f64();
    (0..n).map(|_| (0..dim).map(|_| T::lit(rng.gen_range(-h..=h))).collect()).collect()
}

/// Points on the sphere `|x| = radius` (the two points `+-r` for d = 1, a
/// regular polygon for d = 2, a Fibonacci lattice for d = 3).
pub fn shell_points<T: Real>(dim: usize, radius: T, n: usize) -> Vec<Vec<T>> {
    match dim {
        1 => vec![vec![-radius], vec![radius]],
        2 => (0..n)
            .map(|j| {
                let th = T::PI() * T::lit(2.0) * T::from_usize_lossy(j) / T::from_usize_lossy(n);
                vec![radius * th.cos(), radius * th.sin()]
            })
            .collect(),
        3 => {
            let golden = T::PI() * (T::lit(3.0) - T::lit(5.0).sqrt());
            (0..n)
                .map(|j| {
                    let z = T::one() - T::lit(2.0) * (T::from_usize_lossy(j) + T::lit(0.5)) / T::from_usize_lossy(n);
                    let r = (T::one() - z * z).sqrt();
                    let th = golden * T::from_usize_lossy(j);
                    vec![radius * r * th.cos(), radius * r * th.sin(), radius * z]
                })
                .collect()
        }
        _ => panic!("shell sampling supports d <= 3"),
    }
}

/// Pairs `(x, x + delta * e)` for every base point, every offset length in
/// `lengths` and every direction `e` among the coordinate axes and the
/// main diagonal.
pub fn offset_pairs<T: Real>(points: &[Vec<T>], lengths: &[T]) -> Vec<(Vec<T>, Vec<T>)> {
    let dim = points.first().map_or(0, Vec::len);
    let mut dirs: Vec<Vec<T>> = (0..dim).map(|k| (0..dim).map(|j| if j == k { T::one() } else { T::zero() }).collect()).collect();
    if dim > 1 {
        let c = T::one() / T::from_usize_lossy(dim).sqrt();
        dirs.push(vec![c; dim]);
    }
    let mut out = Vec::with_capacity(points.len() * lengths.len() * dirs.len());
    for p in points {
        for &h in lengths {
            for e in &dirs {
                let q = p.iter().zip(e).map(|(&a, &b)| a + h * b).collect();
                out.push((p.clone(), q));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_size_and_corners() {
        let g = grid_points(2, 1.0f64, 3);
        assert_eq!(g.len(), 9);
        assert!(g.contains(&vec![-1.0, 1.0]));
        assert!(g.contains(&vec![0.0, 0.0]));
    }

    #[test]
    fn halton_is_deterministic_and_seed_dependent() {
        let a = halton_box::<f64>(2, 4.0, 100, 7);
        assert_eq!(a, halton_box::<f64>(2, 4.0, 100, 7));
        assert_ne!(a, halton_box::<f64>(2, 4.0, 100, 8));
        assert!(a.iter().flatten().all(|v| v.abs() <= 4.0));
        let b = halton_ball::<f64>(2, 4.0, 500, 0);
        assert_eq!(b.len(), 500);
        assert!(b.iter().all(|p| norm(p) <= 4.0));
    }

    #[test]
    fn shells_have_the_right_radius() {
        for d in 1..=3 {
            for p in shell_points(d, 10.0f64, 40) {
                assert!((norm(&p) - 10.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn offsets_have_requested_lengths() {
        let pairs = offset_pairs(&[vec![0.5f64, -0.25]], &[0.5, 0.01]);
        assert_eq!(pairs.len(), 6);
        for (x, y) in pairs {
            let d = crate::scalar::dist(&x, &y);
            assert!((d - 0.5).abs() < 1e-15 || (d - 0.01).abs() < 1e-15);
        }
    }
}
