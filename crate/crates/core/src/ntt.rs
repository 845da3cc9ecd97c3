//! Iterative forward/inverse transforms, negacyclic pre/post scaling, and the
//! negative-wrapped-convolution multiplication they compose into, plus the
//! quadratic schoolbook oracle the fast path is tested against.
//!
//! The forward kernel consumes natural-order input and produces a
//! bit-reversed layout internally; the public API permutes back to natural
//! order on exit so that spectral index k always addresses frequency k.

use crate::error::{Error, Result};
use crate::fault::{FaultPosition, PlanWindow};
use crate::zq::{bit_reverse, mod_add, mod_mul, mod_sub, NttDomainParams, PolyZq};

/// Coefficient layout of a transform result.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ordering {
    /// Index k holds frequency k.
    Natural,
    /// Index k holds frequency bit_reverse(k).
    BitReversed,
}

/// A transform result tagged with its layout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NttOutput {
    pub values: PolyZq,
    pub ordering: Ordering,
}

/// Runs the butterfly network in place: stages of halving block size, block
/// twiddle omega^(bit_reverse(block) * m/2), butterflies c = u + t and
/// d = u - t with t = twiddle * b. Output is left in bit-reversed layout.
/// Returns the number of butterflies executed.
pub(crate) fn butterflies_bitrev(
    values: &mut [u32],
    params: &NttDomainParams,
    twiddle: impl Fn(usize) -> u32,
    mut window: Option<&mut PlanWindow<'_>>,
) -> usize {
    let n = values.len();
    let q = params.q;
    let mut site = 0usize;
    for s in (1..=params.log2n).rev() {
        let m = 1usize << s;
        let half = m >> 1;
        for block in 0..(n >> s) {
            let w = twiddle(bit_reverse(block, params.log2n - s) * half);
            let base = block * m;
            for j in 0..half {
                let iu = base + j;
                let ib = iu + half;
                let u = values[iu];
                let mut t = mod_mul(w, values[ib], q);
                let c;
                let d;
                if let Some(win) = window.as_deref_mut() {
                    t = win.tweak(site, FaultPosition::P1, t);
                    c = win.tweak(site, FaultPosition::P2, mod_add(u, t, q));
                    d = win.tweak(site, FaultPosition::P3, mod_sub(u, t, q));
                } else {
                    c = mod_add(u, t, q);
                    d = mod_sub(u, t, q);
                }
                values[iu] = c;
                values[ib] = d;
                site += 1;
            }
        }
    }
    site
}

fn check_len(f: &PolyZq, params: &NttDomainParams) -> Result<()> {
    if f.len() != params.n {
        return Err(Error::LengthMismatch { expected: params.n, got: f.len() });
    }
    Ok(())
}

/// Errors unless the spectrum is in natural order.
pub(crate) fn decode_ordering_natural(spectrum: &NttOutput) -> Result<()> {
    if spectrum.ordering != Ordering::Natural {
        return Err(Error::OrderingMismatch { expected: "natural" });
    }
    Ok(())
}

pub(crate) fn ntt_forward_with(
    f: &PolyZq,
    params: &NttDomainParams,
    window: Option<&mut PlanWindow<'_>>,
) -> Result<NttOutput> {
    check_len(f, params)?;
    let mut values = f.coeffs.clone();
    butterflies_bitrev(&mut values, params, |k| params.omega_pow(k), window);
    let coeffs = (0..params.n)
        .map(|k| values[bit_reverse(k, params.log2n)])
        .collect();
    Ok(NttOutput { values: PolyZq { coeffs }, ordering: Ordering::Natural })
}

/// Forward transform, natural-order output.
pub fn ntt_forward(f: &PolyZq, params: &NttDomainParams) -> Result<NttOutput> {
    ntt_forward_with(f, params, None)
}

/// Executes one forward transform and returns the butterfly count the
/// kernel actually performed ((n/2) * log2 n).
pub fn executed_butterflies(params: &NttDomainParams) -> usize {
    let mut values = vec![0u32; params.n];
    butterflies_bitrev(&mut values, params, |k| params.omega_pow(k), None)
}

/// Inverse transform: the forward kernel over omega^-1, with the n^-1
/// normalization folded into the output permutation pass.
pub fn ntt_inverse(spectrum: &NttOutput, params: &NttDomainParams) -> Result<PolyZq> {
    check_len(&spectrum.values, params)?;
    let n = params.n;
    let mut values: Vec<u32> = match spectrum.ordering {
        Ordering::Natural => spectrum.values.coeffs.clone(),
        Ordering::BitReversed => (0..n)
            .map(|k| spectrum.values.coeffs[bit_reverse(k, params.log2n)])
            .collect(),
    };
    butterflies_bitrev(&mut values, params, |k| params.omega_inv_pow(k), None);
    let inv_n = params.inv_n();
    let coeffs = (0..n)
        .map(|k| mod_mul(values[bit_reverse(k, params.log2n)], inv_n, params.q))
        .collect();
    Ok(PolyZq { coeffs })
}

/// Pre-scaling for the negacyclic transform: element i becomes f[i] * psi^i.
/// `rotation` assigns data index (slot + rotation) mod n to multiplier slot
/// `slot`; the recomputation-with-shifted-operands check runs the array twice
/// with rotations 0 and 1 so a faulty slot touches different elements.
pub(crate) fn pre_process_slots(
    f: &PolyZq,
    params: &NttDomainParams,
    rotation: usize,
    mut window: Option<&mut PlanWindow<'_>>,
) -> Result<PolyZq> {
    check_len(f, params)?;
    if params.psi.is_none() {
        return Err(Error::MissingPsi);
    }
    let n = params.n;
    let mut coeffs = vec![0u32; n];
    for slot in 0..n {
        let i = (slot + rotation) % n;
        let mut v = mod_mul(f.coeffs[i], params.psi_pow(i)?, params.q);
        if let Some(win) = window.as_deref_mut() {
            v = win.tweak_slot(slot, v);
        }
        coeffs[i] = v;
    }
    Ok(PolyZq { coeffs })
}

/// f[i] * psi^i for every i.
pub fn pre_process(f: &PolyZq, params: &NttDomainParams) -> Result<PolyZq> {
    pre_process_slots(f, params, 0, None)
}

/// f[i] * psi^-i for every i; exact inverse of [`pre_process`].
pub fn post_process(f: &PolyZq, params: &NttDomainParams) -> Result<PolyZq> {
    check_len(f, params)?;
    if params.psi.is_none() {
        return Err(Error::MissingPsi);
    }
    let coeffs = f
        .coeffs
        .iter()
        .enumerate()
        .map(|(i, &c)| Ok(mod_mul(c, params.psi_inv_pow(i)?, params.q)))
        .collect::<Result<_>>()?;
    Ok(PolyZq { coeffs })
}

pub(crate) fn pointwise_mul_with(
    a: &NttOutput,
    b: &NttOutput,
    q: u32,
    mut window: Option<&mut PlanWindow<'_>>,
) -> Result<NttOutput> {
    if a.values.len() != b.values.len() {
        return Err(Error::LengthMismatch { expected: a.values.len(), got: b.values.len() });
    }
    if a.ordering != b.ordering {
        return Err(Error::OrderingMismatch { expected: "matching" });
    }
    let coeffs = a
        .values
        .coeffs
        .iter()
        .zip(&b.values.coeffs)
        .enumerate()
        .map(|(k, (&x, &y))| {
            let mut v = mod_mul(x, y, q);
            if let Some(win) = window.as_deref_mut() {
                v = win.tweak_slot(k, v);
            }
            v
        })
        .collect();
    Ok(NttOutput { values: PolyZq { coeffs }, ordering: a.ordering })
}

/// Component-wise product of two equally-ordered spectra.
pub fn pointwise_mul(a: &NttOutput, b: &NttOutput, q: u32) -> Result<NttOutput> {
    pointwise_mul_with(a, b, q, None)
}

/// Negacyclic product f * g mod (X^n + 1, q) via pre-scale, transform,
/// component-wise multiply, inverse transform, post-scale.
pub fn nwc_multiply(f: &PolyZq, g: &PolyZq, params: &NttDomainParams) -> Result<PolyZq> {
    let ft = pre_process(f, params)?;
    let gt = pre_process(g, params)?;
    let fs = ntt_forward(&ft, params)?;
    let gs = ntt_forward(&gt, params)?;
    let hs = pointwise_mul(&fs, &gs, params.q)?;
    post_process(&ntt_inverse(&hs, params)?, params)
}

/// Quadratic-time negacyclic product: h[k] = sum_{i+j=k} f_i g_j minus the
/// wrapped terms with i+j = k+n. The independent oracle for every fast path.
pub fn schoolbook_negacyclic(f: &PolyZq, g: &PolyZq, q: u32) -> Result<PolyZq> {
    if f.len() != g.len() {
        return Err(Error::LengthMismatch { expected: f.len(), got: g.len() });
    }
    let n = f.len();
    let q64 = q as u64;
    let mut pos = vec![0u64; n];
    let mut neg = vec![0u64; n];
    for (i, &fi) in f.coeffs.iter().enumerate() {
        if fi == 0 {
            continue;
        }
        for (j, &gj) in g.coeffs.iter().enumerate() {
            let prod = fi as u64 * gj as u64 % q64;
            let k = i + j;
            if k < n {
                pos[k] += prod;
            } else {
                neg[k - n] += prod;
            }
        }
    }
    let coeffs = pos
        .iter()
        .zip(&neg)
        .map(|(&p, &m)| ((p % q64 + q64 - m % q64) % q64) as u32)
        .collect();
    Ok(PolyZq { coeffs })
}

/// Left rotation by one: element i of the result is f[(i+1) mod n].
pub fn rotate_left(f: &PolyZq) -> PolyZq {
    let n = f.len();
    let coeffs = (0..n).map(|i| f.coeffs[(i + 1) % n]).collect();
    PolyZq { coeffs }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zq::NttMatrixOracle;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn small() -> NttDomainParams {
        NttDomainParams::new(4, 17, 4, Some(2)).unwrap()
    }

    fn tiny() -> NttDomainParams {
        NttDomainParams::new(2, 17, 16, Some(4)).unwrap()
    }

    #[test]
    fn forward_impulse_examples() {
        let p = small();
        let out = ntt_forward(&PolyZq::impulse(4, 0), &p).unwrap();
        assert_eq!(out.values.coeffs, vec![1, 1, 1, 1]);
        assert_eq!(out.ordering, Ordering::Natural);

        let out = ntt_forward(&PolyZq::impulse(4, 1), &p).unwrap();
        assert_eq!(out.values.coeffs, vec![1, 4, 16, 13]);

        let out = ntt_forward(&PolyZq::zero(4), &p).unwrap();
        assert_eq!(out.values.coeffs, vec![0, 0, 0, 0]);
    }

    #[test]
    fn forward_rejects_length_mismatch() {
        let p = small();
        assert!(matches!(
            ntt_forward(&PolyZq::zero(8), &p),
            Err(Error::LengthMismatch { expected: 4, got: 8 })
        ));
    }

    #[test]
    fn round_trip_exhaustive_n4() {
        let p = small();
        let mut f = PolyZq::zero(4);
        for a in 0..17u32 {
            for b in 0..17 {
                for c in 0..17 {
                    for d in 0..17 {
                        f.coeffs.copy_from_slice(&[a, b, c, d]);
                        let back = ntt_inverse(&ntt_forward(&f, &p).unwrap(), &p).unwrap();
                        assert_eq!(back, f);
                    }
                }
            }
        }
    }

    #[test]
    fn round_trip_randomized_n256() {
        let p = NttDomainParams::round1();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let f = PolyZq::uniform(&mut rng, 256, p.q);
            let back = ntt_inverse(&ntt_forward(&f, &p).unwrap(), &p).unwrap();
            assert_eq!(back, f);
        }
    }

    #[test]
    fn inverse_accepts_bitreversed_input() {
        let p = NttDomainParams::round1();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let f = PolyZq::uniform(&mut rng, 256, p.q);
        let nat = ntt_forward(&f, &p).unwrap();
        let br = PolyZq {
            coeffs: (0..256).map(|k| nat.values.coeffs[bit_reverse(k, 8)]).collect(),
        };
        let out = ntt_inverse(&NttOutput { values: br, ordering: Ordering::BitReversed }, &p).unwrap();
        assert_eq!(out, f);
    }

    #[test]
    fn matrix_oracle_agreement() {
        let p = NttDomainParams::round1();
        let theta = NttMatrixOracle::theta(&p);
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..20 {
            let f = PolyZq::uniform(&mut rng, 256, p.q);
            assert_eq!(ntt_forward(&f, &p).unwrap().values, theta.apply(&f).unwrap());
        }
        // impulse picks out the first column
        let e0 = PolyZq::impulse(256, 0);
        let col0: Vec<u32> = theta.matrix.iter().map(|r| r[0]).collect();
        assert_eq!(theta.apply(&e0).unwrap().coeffs, col0);
    }

    #[test]
    fn rotation_matrix_identity() {
        // rho applied to the left-rotated input equals theta applied to the
        // original input.
        let p = small();
        let theta = NttMatrixOracle::theta(&p);
        let rho = NttMatrixOracle::rho(&p);
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..50 {
            let f = PolyZq::uniform(&mut rng, 4, p.q);
            assert_eq!(
                rho.apply(&rotate_left(&f)).unwrap(),
                theta.apply(&f).unwrap()
            );
        }
    }

    #[test]
    fn linearity() {
        let p = NttDomainParams::round1();
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        for _ in 0..50 {
            let f = PolyZq::uniform(&mut rng, 256, p.q);
            let g = PolyZq::uniform(&mut rng, 256, p.q);
            let a = rng.gen_range(0..p.q);
            let b = rng.gen_range(0..p.q);
            let combo = PolyZq {
                coeffs: f
                    .coeffs
                    .iter()
                    .zip(&g.coeffs)
                    .map(|(&x, &y)| mod_add(mod_mul(a, x, p.q), mod_mul(b, y, p.q), p.q))
                    .collect(),
            };
            let fs = ntt_forward(&f, &p).unwrap();
            let gs = ntt_forward(&g, &p).unwrap();
            let cs = ntt_forward(&combo, &p).unwrap();
            for k in 0..256 {
                let want = mod_add(
                    mod_mul(a, fs.values.coeffs[k], p.q),
                    mod_mul(b, gs.values.coeffs[k], p.q),
                    p.q,
                );
                assert_eq!(cs.values.coeffs[k], want);
            }
        }
    }

    #[test]
    fn pre_process_examples() {
        let p = tiny();
        let f = PolyZq::new(vec![1, 1], 17).unwrap();
        assert_eq!(pre_process(&f, &p).unwrap().coeffs, vec![1, 4]);
        assert_eq!(
            pre_process(&PolyZq::zero(2), &p).unwrap().coeffs,
            vec![0, 0]
        );

        // last element of the scaled impulse: 62^255 mod 7681, pinned by an
        // independent repeated-multiply oracle
        let mut expect = 1u64;
        for _ in 0..255 {
            expect = expect * 62 % 7681;
        }
        assert_eq!(expect, 6566);
        let r1 = NttDomainParams::round1();
        let scaled = pre_process(&PolyZq::impulse(256, 255), &r1).unwrap();
        assert_eq!(scaled.coeffs[255], 6566);
    }

    #[test]
    fn post_inverts_pre() {
        let p = NttDomainParams::round1();
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        for _ in 0..100 {
            let f = PolyZq::uniform(&mut rng, 256, p.q);
            assert_eq!(post_process(&pre_process(&f, &p).unwrap(), &p).unwrap(), f);
        }
        let t = tiny();
        let f = PolyZq::new(vec![1, 4], 17).unwrap();
        assert_eq!(post_process(&f, &t).unwrap().coeffs, vec![1, 1]);
    }

    #[test]
    fn pre_process_requires_psi() {
        let p = NttDomainParams::kyber_field();
        assert_eq!(
            pre_process(&PolyZq::zero(256), &p).unwrap_err(),
            Error::MissingPsi
        );
        assert_eq!(
            post_process(&PolyZq::zero(256), &p).unwrap_err(),
            Error::MissingPsi
        );
    }

    #[test]
    fn pointwise_examples() {
        let ones = NttOutput {
            values: PolyZq::new(vec![1, 1, 1, 1], 17).unwrap(),
            ordering: Ordering::Natural,
        };
        let x = NttOutput {
            values: PolyZq::new(vec![3, 5, 7, 11], 17).unwrap(),
            ordering: Ordering::Natural,
        };
        assert_eq!(pointwise_mul(&ones, &x, 17).unwrap().values, x.values);

        let a = NttOutput {
            values: PolyZq::new(vec![2, 3], 17).unwrap(),
            ordering: Ordering::Natural,
        };
        let b = NttOutput {
            values: PolyZq::new(vec![3, 4], 17).unwrap(),
            ordering: Ordering::Natural,
        };
        assert_eq!(pointwise_mul(&a, &b, 17).unwrap().values.coeffs, vec![6, 12]);

        let br = NttOutput { values: a.values.clone(), ordering: Ordering::BitReversed };
        assert!(matches!(
            pointwise_mul(&br, &b, 17),
            Err(Error::OrderingMismatch { .. })
        ));
    }

    #[test]
    fn nwc_small_products() {
        let t = tiny();
        let one_one = PolyZq::new(vec![1, 1], 17).unwrap();
        assert_eq!(nwc_multiply(&one_one, &one_one, &t).unwrap().coeffs, vec![0, 2]);

        let x = PolyZq::impulse(2, 1);
        assert_eq!(nwc_multiply(&x, &x, &t).unwrap().coeffs, vec![16, 0]);

        let unit = PolyZq::impulse(2, 0);
        let g = PolyZq::new(vec![5, 9], 17).unwrap();
        assert_eq!(nwc_multiply(&unit, &g, &t).unwrap(), g);
    }

    #[test]
    fn schoolbook_examples() {
        let x = PolyZq::impulse(2, 1);
        assert_eq!(
            schoolbook_negacyclic(&x, &x, 17).unwrap().coeffs,
            vec![16, 0]
        );
        let e0 = PolyZq::impulse(4, 0);
        let g = PolyZq::new(vec![3, 1, 4, 1], 17).unwrap();
        assert_eq!(schoolbook_negacyclic(&e0, &g, 17).unwrap(), g);
        assert!(matches!(
            schoolbook_negacyclic(&e0, &PolyZq::zero(8), 17),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn schoolbook_commutes() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..1000 {
            let f = PolyZq::uniform(&mut rng, 8, 17);
            let g = PolyZq::uniform(&mut rng, 8, 17);
            assert_eq!(
                schoolbook_negacyclic(&f, &g, 17).unwrap(),
                schoolbook_negacyclic(&g, &f, 17).unwrap()
            );
        }
    }

    #[test]
    fn nwc_matches_schoolbook() {
        for p in [tiny(), small(), NttDomainParams::round1()] {
            let mut rng = ChaCha8Rng::seed_from_u64(18);
            let trials = if p.n > 16 { 50 } else { 500 };
            for _ in 0..trials {
                let f = PolyZq::uniform(&mut rng, p.n, p.q);
                let g = PolyZq::uniform(&mut rng, p.n, p.q);
                assert_eq!(
                    nwc_multiply(&f, &g, &p).unwrap(),
                    schoolbook_negacyclic(&f, &g, p.q).unwrap()
                );
            }
        }
    }
}
