//! Algorithm-level error detection for the seven-stage transform: even/odd
//! shift-combine encoding, the per-slot decoder, and the spectrum-sum
//! checksum.
//!
//! The even and odd coefficient lanes are encoded independently as
//! alpha*lane + beta*rotate(lane). In the spectral domain the encoded slot k
//! equals (alpha + beta/gamma_k) * f_hat - 2*beta*lane(0)/gamma_k where
//! gamma_k is the slot's quadratic-factor root, so decoding takes one stored
//! correction multiply, one add, and one stored inverse multiply per output
//! coefficient. The checksum ties the decoded spectrum sum to the first two
//! input coefficients: sum_j f_hat(j) = 128 * (f(0) + f(1)) mod q.

use crate::detect_nwc::DetectionVerdict;
use crate::error::{Error, Result};
use crate::fault::{FaultPlan, PlanWindow};
use crate::kyber::{
    gamma, kyber_ntt_with, KyberNttVector, KyberPoly, KYBER_BUTTERFLIES, KYBER_N, KYBER_Q,
};
use crate::zq::{mod_add, mod_inv, mod_mul};

/// Coding scalars with the 128-entry decode and correction tables:
/// decode3[k] = (beta/gamma_k + alpha)^-1 and correction[k] = 2*beta/gamma_k.
/// Construction rejects scalars whose decode denominator vanishes at any
/// slot; gamma_k has odd exponent so alpha = beta is always fine here.
#[derive(Debug, Clone)]
pub struct KyberCodingParams {
    pub alpha: u32,
    pub beta: u32,
    decode3: [u32; 128],
    correction: [u32; 128],
}

impl KyberCodingParams {
    pub fn new(alpha: u32, beta: u32) -> Result<Self> {
        let q = KYBER_Q;
        if alpha >= q || beta >= q {
            return Err(Error::InvalidModulus(format!(
                "coding scalars must be reduced mod {q}"
            )));
        }
        let mut decode3 = [0u32; 128];
        let mut correction = [0u32; 128];
        for k in 0..128 {
            let gamma_inv = mod_inv(gamma(k), q)?;
            let denom = mod_add(mod_mul(beta, gamma_inv, q), alpha, q);
            if denom == 0 {
                return Err(Error::CodingVanishes { index: k });
            }
            decode3[k] = mod_inv(denom, q)?;
            correction[k] = mod_mul(mod_mul(2, beta, q), gamma_inv, q);
        }
        Ok(Self { alpha, beta, decode3, correction })
    }

    /// The (1, 1) default; valid because every slot's root has odd exponent.
    pub fn default_pair() -> Self {
        Self::new(1, 1).expect("(1,1) never vanishes on odd-exponent roots")
    }

    pub fn decode3(&self, k: usize) -> u32 {
        self.decode3[k]
    }

    pub fn correction(&self, k: usize) -> u32 {
        self.correction[k]
    }
}

/// Lane-wise shift-combine: even slots take alpha*f(2i) + beta*f(2i+2 mod n),
/// odd slots take alpha*f(2i+1) + beta*f(2i+3 mod n); each lane rotates by
/// one pair independently.
pub fn encode_kyber(f: &KyberPoly, coding: &KyberCodingParams) -> KyberPoly {
    let q = KYBER_Q;
    let (a, b) = (coding.alpha, coding.beta);
    let mut coeffs = [0u32; KYBER_N];
    for i in 0..128 {
        coeffs[2 * i] = mod_add(
            mod_mul(a, f.coeffs[2 * i], q),
            mod_mul(b, f.coeffs[(2 * i + 2) % KYBER_N], q),
            q,
        );
        coeffs[2 * i + 1] = mod_add(
            mod_mul(a, f.coeffs[2 * i + 1], q),
            mod_mul(b, f.coeffs[(2 * i + 3) % KYBER_N], q),
            q,
        );
    }
    KyberPoly { coeffs }
}

/// Recovers the plain spectrum from the transform of an encoded input.
/// f0 and f1 are the original (pre-encoding) first two coefficients; they
/// feed the per-slot correction terms.
pub fn decode_kyber(
    encoded: &KyberNttVector,
    f0: u32,
    f1: u32,
    coding: &KyberCodingParams,
) -> KyberNttVector {
    let q = KYBER_Q;
    let mut values = [0u32; KYBER_N];
    for k in 0..128 {
        let corr = coding.correction[k];
        let dec = coding.decode3[k];
        values[2 * k] = mod_mul(
            mod_add(encoded.values[2 * k], mod_mul(corr, f0, q), q),
            dec,
            q,
        );
        values[2 * k + 1] = mod_mul(
            mod_add(encoded.values[2 * k + 1], mod_mul(corr, f1, q), q),
            dec,
            q,
        );
    }
    KyberNttVector { values }
}

/// The spectrum-sum checksum: flags unless
/// sum_j F[j] = 128 * (f0 + f1) (mod q). The sum is layout-invariant.
pub fn checksum_kyber(f0: u32, f1: u32, spectrum: &KyberNttVector) -> DetectionVerdict {
    let q = KYBER_Q as u64;
    let sum: u64 = spectrum.values.iter().map(|&v| v as u64).sum();
    let expect = 128 * (f0 as u64 + f1 as u64) % q;
    DetectionVerdict::compare((sum % q) as u32, expect as u32)
}

/// The protected transform pipeline: capture f(0) and f(1), encode, run the
/// seven-stage transform (through the fault plan when one is given), decode
/// with the retained values, and evaluate the sum checksum on the decoded
/// spectrum. Fault-free output equals the plain transform exactly.
pub fn protected_kyber_ntt(
    f: &KyberPoly,
    coding: &KyberCodingParams,
    plan: Option<&FaultPlan>,
) -> Result<(KyberNttVector, DetectionVerdict)> {
    if let Some(p) = plan {
        if p.total_sites != KYBER_BUTTERFLIES {
            return Err(Error::SiteCountMismatch {
                plan: p.total_sites,
                target: KYBER_BUTTERFLIES,
            });
        }
    }
    let f0 = f.coeffs[0];
    let f1 = f.coeffs[1];
    let encoded = encode_kyber(f, coding);
    let spectrum = match plan {
        Some(p) => {
            let mut w = PlanWindow::new(p, 0, KYBER_BUTTERFLIES, KYBER_Q);
            kyber_ntt_with(&encoded, Some(&mut w))
        }
        None => kyber_ntt_with(&encoded, None),
    };
    let decoded = decode_kyber(&spectrum, f0, f1, coding);
    let verdict = checksum_kyber(f0, f1, &decoded);
    Ok((decoded, verdict))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fault::{CorruptionModel, FaultEvent, FaultMode, FaultPosition};
    use crate::kyber::kyber_ntt;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn default_coding_is_valid() {
        let c = KyberCodingParams::default_pair();
        assert_eq!((c.alpha, c.beta), (1, 1));
    }

    #[test]
    fn tables_satisfy_their_definition() {
        let c = KyberCodingParams::new(1, 1).unwrap();
        let q = KYBER_Q;
        for k in 0..128 {
            let gi = mod_inv(gamma(k), q).unwrap();
            let denom = mod_add(gi, 1, q);
            assert_eq!(mod_mul(c.decode3(k), denom, q), 1);
            assert_eq!(c.correction(k), mod_mul(2, gi, q));
        }

        // beta = 0 degenerates to the identity decode
        let id = KyberCodingParams::new(1, 0).unwrap();
        for k in 0..128 {
            assert_eq!((id.decode3(k), id.correction(k)), (1, 0));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(40);
        let f = KyberPoly::uniform(&mut rng);
        let spec = kyber_ntt(&f);
        assert_eq!(decode_kyber(&spec, f.coeffs[0], f.coeffs[1], &id), spec);
    }

    #[test]
    fn encode_identity_and_rotation_examples() {
        // alpha=1, beta=0 leaves the input unchanged
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let f = KyberPoly::uniform(&mut rng);
        let id = KyberCodingParams::new(1, 0).unwrap();
        assert_eq!(encode_kyber(&f, &id), f);

        // alpha=0, beta=1 rotates each lane by one pair
        let rot = KyberCodingParams::new(0, 1).unwrap();
        let mut g = KyberPoly::zero();
        for i in 0..128 {
            g.coeffs[2 * i] = i as u32;
        }
        let enc = encode_kyber(&g, &rot);
        for i in 0..127 {
            assert_eq!(enc.coeffs[2 * i], (i + 1) as u32);
        }
        assert_eq!(enc.coeffs[254], 0);

        let z = KyberPoly::zero();
        assert_eq!(encode_kyber(&z, &KyberCodingParams::default_pair()), z);
    }

    #[test]
    fn decode_inverts_encode_through_the_transform() {
        let c = KyberCodingParams::default_pair();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..500 {
            let f = KyberPoly::uniform(&mut rng);
            let enc = encode_kyber(&f, &c);
            let dec = decode_kyber(&kyber_ntt(&enc), f.coeffs[0], f.coeffs[1], &c);
            assert_eq!(dec, kyber_ntt(&f));
        }
    }

    #[test]
    fn decode_with_zero_head_is_pure_scaling() {
        // f(0) = f(1) = 0 kills the correction terms
        let c = KyberCodingParams::new(2, 7).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let mut f = KyberPoly::uniform(&mut rng);
        f.coeffs[0] = 0;
        f.coeffs[1] = 0;
        let spec = kyber_ntt(&encode_kyber(&f, &c));
        let dec = decode_kyber(&spec, 0, 0, &c);
        for k in 0..128 {
            assert_eq!(dec.values[2 * k], mod_mul(spec.values[2 * k], c.decode3(k), KYBER_Q));
            assert_eq!(
                dec.values[2 * k + 1],
                mod_mul(spec.values[2 * k + 1], c.decode3(k), KYBER_Q)
            );
        }
    }

    #[test]
    fn checksum_examples() {
        // impulse: spectrum sums to 128 and 128*(1+0) = 128
        let spec = kyber_ntt(&KyberPoly::impulse(0));
        assert!(!checksum_kyber(1, 0, &spec).flagged);

        let zero = KyberNttVector::zero();
        assert!(!checksum_kyber(0, 0, &zero).flagged);

        // any single perturbation shifts the sum and flags
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        let f = KyberPoly::uniform(&mut rng);
        let mut spec = kyber_ntt(&f);
        let v = checksum_kyber(f.coeffs[0], f.coeffs[1], &spec);
        assert!(!v.flagged);
        spec.values[97] = (spec.values[97] + 1) % KYBER_Q;
        assert!(checksum_kyber(f.coeffs[0], f.coeffs[1], &spec).flagged);
    }

    #[test]
    fn protected_pipeline_matches_plain_transform() {
        let c = KyberCodingParams::default_pair();
        let mut rng = ChaCha8Rng::seed_from_u64(45);
        for _ in 0..500 {
            let f = KyberPoly::uniform(&mut rng);
            let (out, verdict) = protected_kyber_ntt(&f, &c, None).unwrap();
            assert!(!verdict.flagged);
            assert_eq!(out, kyber_ntt(&f));
        }
    }

    #[test]
    fn single_butterfly_faults_are_caught() {
        let c = KyberCodingParams::default_pair();
        let mut rng = ChaCha8Rng::seed_from_u64(46);
        let f = KyberPoly::uniform(&mut rng);
        let clean = kyber_ntt(&f);
        for site in [0usize, 1, 127, 500, 895] {
            for position in [FaultPosition::P1, FaultPosition::P2, FaultPosition::P3] {
                let plan = FaultPlan {
                    mode: FaultMode::Normal,
                    model: CorruptionModel::Additive,
                    seed: 0,
                    total_sites: KYBER_BUTTERFLIES,
                    requested_faults: 1,
                    events: vec![FaultEvent { site, position, delta: 77 }],
                };
                let (out, verdict) = protected_kyber_ntt(&f, &c, Some(&plan)).unwrap();
                assert_ne!(out, clean);
                assert!(verdict.flagged, "site {site} {position:?} missed");
            }
        }
    }

    #[test]
    fn crafted_cancellation_is_provably_missed() {
        // two last-stage sum-leg faults whose decode-weighted deltas cancel:
        // the spectrum is wrong but the sum checksum cannot see it
        let c = KyberCodingParams::default_pair();
        let q = KYBER_Q;
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        let f = KyberPoly::uniform(&mut rng);
        let clean = kyber_ntt(&f);

        // last stage (len = 2) starts at butterfly 768; butterflies 768 and
        // 770 write their sum legs into flat positions 0 and 4 (slots 0, 2)
        let d1 = 100u32;
        // delta2 = -d1 * decode3[0] / decode3[2] so the weighted sum is zero
        let d2 = mod_mul(
            q - mod_mul(d1, c.decode3(0), q),
            mod_inv(c.decode3(2), q).unwrap(),
            q,
        );
        let plan = FaultPlan {
            mode: FaultMode::Normal,
            model: CorruptionModel::Additive,
            seed: 0,
            total_sites: KYBER_BUTTERFLIES,
            requested_faults: 2,
            events: vec![
                FaultEvent { site: 768, position: FaultPosition::P2, delta: d1 },
                FaultEvent { site: 770, position: FaultPosition::P2, delta: d2 },
            ],
        };
        let (out, verdict) = protected_kyber_ntt(&f, &c, Some(&plan)).unwrap();
        assert_ne!(out, clean, "output must actually be corrupted");
        assert!(!verdict.flagged, "sum-cancelling corruption is invisible");
    }

    #[test]
    fn plan_site_universe_is_checked() {
        let c = KyberCodingParams::default_pair();
        let f = KyberPoly::zero();
        let plan = FaultPlan::empty(1024);
        assert!(matches!(
            protected_kyber_ntt(&f, &c, Some(&plan)),
            Err(Error::SiteCountMismatch { plan: 1024, target: 896 })
        ));
    }
}
