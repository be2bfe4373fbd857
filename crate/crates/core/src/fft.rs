//! Discrete Fourier transforms over [`ComplexApprox`] values.
//!
//! All transforms here use the positive sign: `X_k = sum_t x_t exp(2 pi i k t / N)`.

use crate::complex::{ComplexApprox, RootTable};
use crate::numeric::Real;

/// Twiddles are materialised in chunks of this many entries per pass.
const TWIDDLE_CHUNK: usize = 1 << 12;

/// In-place radix-2 transform of length `data.len()`, a power of two.
///
/// `sign = +1` computes sums against `exp(+2 pi i kt/L)`, `-1` against the
/// conjugate. No scaling is applied.
pub fn fft_pow2<R: Real>(data: &mut [ComplexApprox<R>], sign: i32, roots: &RootTable<R>) {
    let len = data.len();
    assert!(len.is_power_of_two(), "length {len} is not a power of two");
    assert_eq!(roots.modulus(), len as u64);
    if len == 1 {
        return;
    }
    bit_reverse(data);

    let mut twiddles = Vec::with_capacity(TWIDDLE_CHUNK.min(len / 2));
    let mut half = 1usize;
    while half < len {
        let stride = (len / (2 * half)) as u64;
        let mut j0 = 0;
        while j0 < half {
            let j1 = (j0 + TWIDDLE_CHUNK).min(half);
            twiddles.clear();
            twiddles.extend((j0..j1).map(|j| {
                let t = j as u64 * stride;
                if sign >= 0 {
                    roots.get(t)
                } else {
                    roots.get_conj(t)
                }
            }));
            for block in (0..len).step_by(2 * half) {
                for (w, j) in twiddles.iter().zip(j0..j1) {
                    let (i, k) = (block + j, block + j + half);
                    let t = w.mul(&data[k]);
                    let u = data[i].clone();
                    data[k] = u.sub(&t);
                    data[i] = u.add(&t);
                }
            }
            j0 = j1;
        }
        half *= 2;
    }
}

fn bit_reverse<T>(data: &mut [T]) {
    let n = data.len();
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if i < j {
            data.swap(i, j);
        }
    }
}

/// Direct O(N^2) transform; the test oracle for [`dft`].
pub fn naive_dft<R: Real>(x: &[ComplexApprox<R>], prec: u32) -> Vec<ComplexApprox<R>> {
    let n = x.len() as u64;
    if n == 0 {
        return Vec::new();
    }
    let roots = RootTable::<R>::new(n, prec);
    (0..n)
        .map(|k| {
            x.iter().enumerate().fold(ComplexApprox::zero(prec), |acc, (t, xt)| {
                let e = (k as u128 * t as u128 % n as u128) as u64;
                acc.add(&xt.mul(&roots.get(e)))
            })
        })
        .collect()
}

/// Transform of arbitrary length: radix-2 when possible, otherwise the
/// chirp-z (Bluestein) reduction to a power-of-two cyclic convolution.
pub fn dft<R: Real>(x: &[ComplexApprox<R>], prec: u32) -> Vec<ComplexApprox<R>> {
    let n = x.len();
    if n <= 1 {
        return x.to_vec();
    }
    if n.is_power_of_two() {
        let mut data = x.to_vec();
        let roots = RootTable::new(n as u64, prec);
        fft_pow2(&mut data, 1, &roots);
        return data;
    }
    bluestein(x, prec)
}

/// Length of the cyclic convolution used by Bluestein for length `n`.
pub fn bluestein_length(n: usize) -> usize {
    (2 * n - 1).next_power_of_two()
}

fn bluestein<R: Real>(x: &[ComplexApprox<R>], prec: u32) -> Vec<ComplexApprox<R>> {
    let n = x.len();
    let n64 = n as u64;
    let len = bluestein_length(n);
    // chirp(t) = exp(pi i t^2 / n) = exp(2 pi i (t^2 mod 2n) / 2n)
    let chirp_roots = RootTable::<R>::new(2 * n64, prec);
    let chirp = |t: u64| -> ComplexApprox<R> {
        let e = (t as u128 * t as u128 % (2 * n64) as u128) as u64;
        chirp_roots.get(e)
    };
    let fft_roots = RootTable::<R>::new(len as u64, prec);

    let mut b = vec![ComplexApprox::zero(prec); len];
    b[0] = chirp(0).conj();
    for t in 1..n {
        let w = chirp(t as u64).conj();
        b[len - t] = w.clone();
        b[t] = w;
    }
    fft_pow2(&mut b, -1, &fft_roots);

    let mut a = vec![ComplexApprox::zero(prec); len];
    for (t, xt) in x.iter().enumerate() {
        a[t] = xt.mul(&chirp(t as u64));
    }
    fft_pow2(&mut a, -1, &fft_roots);
    for (ai, bi) in a.iter_mut().zip(b.iter()) {
        *ai = ai.mul(bi);
    }
    drop(b);
    fft_pow2(&mut a, 1, &fft_roots);

    // Division by a power of two is exact apart from the tracked rounding.
    let inv_len = R::from_f64(1.0 / len as f64, prec);
    a.truncate(n);
    a.iter()
        .enumerate()
        .map(|(k, ck)| ck.scale(&inv_len, 0.0).mul(&chirp(k as u64)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::unit_root;
    use crate::numeric::DoubleDouble;
    use proptest::prelude::*;

    type C = ComplexApprox<DoubleDouble>;

    fn signal(n: usize, seed: u64) -> Vec<C> {
        (0..n)
            .map(|t| unit_root((seed.wrapping_mul(t as u64 * t as u64 + 7)) % 97, 97, 106))
            .collect()
    }

    fn assert_close(a: &[C], b: &[C]) {
        assert_eq!(a.len(), b.len());
        for (k, (x, y)) in a.iter().zip(b).enumerate() {
            assert!(x.overlaps(y, 0.0), "entry {k}: {:?} vs {:?}", x.to_f64_pair(), y.to_f64_pair());
            assert!(x.err < 1e-20, "entry {k}: err {}", x.err);
        }
    }

    #[test]
    fn radix2_matches_naive() {
        for n in [1usize, 2, 4, 8, 64] {
            let x = signal(n, 3);
            assert_close(&dft(&x, 106), &naive_dft(&x, 106));
        }
    }

    #[test]
    fn bluestein_matches_naive_on_awkward_lengths() {
        for n in [3usize, 5, 6, 7, 12, 30, 97, 100] {
            let x = signal(n, 5);
            assert_close(&dft(&x, 106), &naive_dft(&x, 106));
        }
    }

    #[test]
    fn impulse_transforms_to_constant() {
        let mut x = vec![C::zero(106); 10];
        x[0] = C::one(106);
        for v in dft(&x, 106) {
            assert!(v.overlaps(&C::one(106), 0.0));
        }
    }

    #[test]
    fn f64_backend_reports_larger_error() {
        let x: Vec<ComplexApprox<f64>> = (0..50).map(|t| unit_root(t, 50, 53)).collect();
        let y = dft(&x, 53);
        // sum_t exp(2 pi i t/50) exp(2 pi i k t/50) vanishes unless k = 49
        assert!(y[49].overlaps(&ComplexApprox::from_int(50, 53), 0.0));
        assert!(y[0].overlaps(&ComplexApprox::zero(53), 0.0));
        assert!(y[0].err > 1e-15);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn bluestein_agrees_with_naive(n in 2usize..40, seed in 0u64..1000) {
            let x = signal(n, seed);
            let fast = dft(&x, 106);
            let slow = naive_dft(&x, 106);
            for (a, b) in fast.iter().zip(&slow) {
                prop_assert!(a.overlaps(b, 0.0));
            }
        }
    }
}
