//! Algorithm-level error detection for the negacyclic pointwise product, and
//! a recomputation-with-shifted-operands check for the pre-scaling stage.
//!
//! The product path exploits a shift-combine redundancy: transforming
//! alpha*f + beta*rotate(f) yields the original spectrum scaled by
//! (alpha + beta*omega^-k) at frequency k, so the scaled spectrum can be
//! decoded back while a single cheap identity ties the decoded product's
//! index 0 to the input sums: h(0) = (sum f~) * (sum g~). The comparison of
//! those two residues is the checksum; faults inside the butterfly networks
//! that disturb index 0 of either spectrum break it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fault::{FaultPlan, PlanWindow};
use crate::ntt::{
    decode_ordering_natural, ntt_forward_with, pointwise_mul_with, pre_process, pre_process_slots,
    NttOutput, Ordering,
};
use crate::zq::{mod_add, mod_inv, mod_mul, NttDomainParams, PolyZq};

/// Outcome of one checksum comparison. `flagged` holds exactly when the two
/// compared residues differ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetectionVerdict {
    pub flagged: bool,
    pub check_lhs: u32,
    pub check_rhs: u32,
}

impl DetectionVerdict {
    pub fn compare(lhs: u32, rhs: u32) -> Self {
        Self { flagged: lhs != rhs, check_lhs: lhs, check_rhs: rhs }
    }
}

/// Which decoder power to apply: one transform was encoded (power 1) or a
/// product of two encoded transforms (power 2).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecodePower {
    Single,
    Square,
}

/// Shift-combine coding scalars together with the per-frequency decode
/// tables. Construction fails if alpha + beta * omega^-k vanishes anywhere:
/// that frequency would be destroyed by the encoding. Note alpha = beta can
/// never be valid, since omega^(n/2) = -1 zeroes index n/2.
#[derive(Debug, Clone)]
pub struct CodingParams {
    pub alpha: u32,
    pub beta: u32,
    n: usize,
    q: u32,
    decode1: Vec<u32>,
    decode2: Vec<u32>,
}

impl CodingParams {
    pub fn new(alpha: u32, beta: u32, params: &NttDomainParams) -> Result<Self> {
        let q = params.q;
        if alpha >= q || beta >= q {
            return Err(Error::InvalidModulus(format!(
                "coding scalars must be reduced mod {q}"
            )));
        }
        let mut decode1 = Vec::with_capacity(params.n);
        let mut decode2 = Vec::with_capacity(params.n);
        for k in 0..params.n {
            let v = mod_add(alpha, mod_mul(beta, params.omega_inv_pow(k), q), q);
            if v == 0 {
                return Err(Error::CodingVanishes { index: k });
            }
            let inv = mod_inv(v, q)?;
            decode1.push(inv);
            decode2.push(mod_mul(inv, inv, q));
        }
        Ok(Self { alpha, beta, n: params.n, q, decode1, decode2 })
    }

    /// First valid (alpha, beta) pair in a deterministic small search,
    /// ordered by alpha + beta. (1, 1) always vanishes at k = n/2, so this
    /// lands on (1, 2) for every supported parameter set.
    pub fn first_valid(params: &NttDomainParams) -> Self {
        for sum in 2..2 * params.q {
            for alpha in 1..sum.min(params.q) {
                let beta = sum - alpha;
                if beta >= params.q {
                    continue;
                }
                if let Ok(c) = Self::new(alpha, beta, params) {
                    return c;
                }
            }
        }
        unreachable!("a valid coding pair exists for every prime field")
    }

    /// ((alpha + beta * omega^-k))^-1.
    pub fn decode1(&self, k: usize) -> u32 {
        self.decode1[k]
    }

    /// ((alpha + beta * omega^-k)^2)^-1.
    pub fn decode2(&self, k: usize) -> u32 {
        self.decode2[k]
    }
}

/// alpha*f[i] + beta*f[(i+1) mod n], the raw shift-combine map.
pub fn shift_combine(f: &PolyZq, alpha: u32, beta: u32, q: u32) -> PolyZq {
    let n = f.len();
    let coeffs = (0..n)
        .map(|i| {
            mod_add(
                mod_mul(alpha, f.coeffs[i], q),
                mod_mul(beta, f.coeffs[(i + 1) % n], q),
                q,
            )
        })
        .collect();
    PolyZq { coeffs }
}

/// Encodes with the coding's scalars.
pub fn encode_shift_combine(f: &PolyZq, coding: &CodingParams) -> PolyZq {
    shift_combine(f, coding.alpha, coding.beta, coding.q)
}

/// Undoes the encoding in the spectral domain: frequency k is multiplied by
/// the stored inverse of (alpha + beta*omega^-k)^power. Requires natural
/// ordering so that index k addresses frequency k.
pub fn decode_spectrum(
    spectrum: &NttOutput,
    coding: &CodingParams,
    power: DecodePower,
) -> Result<NttOutput> {
    decode_ordering_natural(spectrum)?;
    if spectrum.values.len() != coding.n {
        return Err(Error::LengthMismatch { expected: coding.n, got: spectrum.values.len() });
    }
    let table = match power {
        DecodePower::Single => &coding.decode1,
        DecodePower::Square => &coding.decode2,
    };
    let coeffs = spectrum
        .values
        .coeffs
        .iter()
        .zip(table)
        .map(|(&v, &d)| mod_mul(v, d, coding.q))
        .collect();
    Ok(NttOutput { values: PolyZq { coeffs }, ordering: Ordering::Natural })
}

/// The index-0 product identity: the decoded product's h(0) must equal
/// (sum of f~) * (sum of g~), both computed directly from the scaled inputs.
pub fn checksum_nwc(f_tilde: &PolyZq, g_tilde: &PolyZq, h0: u32, q: u32) -> DetectionVerdict {
    let sum = |p: &PolyZq| -> u32 {
        let mut acc = 0u64;
        for &c in &p.coeffs {
            acc += c as u64;
        }
        (acc % q as u64) as u32
    };
    DetectionVerdict::compare(h0, mod_mul(sum(f_tilde), sum(g_tilde), q))
}

/// The protected component-wise product pipeline: pre-scale both inputs,
/// encode both, transform both (through the fault plan when one is given),
/// multiply component-wise, decode with the squared table, and compare the
/// decoded index 0 against the input-sum product.
///
/// The plan's site universe is the two butterfly networks back to back
/// (2 * butterfly_count sites), optionally followed by the n component-wise
/// multiplier slots when the plan was built over the larger universe.
pub fn protected_nwc_pointwise(
    f: &PolyZq,
    g: &PolyZq,
    params: &NttDomainParams,
    coding: &CodingParams,
    plan: Option<&FaultPlan>,
) -> Result<(NttOutput, DetectionVerdict)> {
    let nbf = params.butterfly_count();
    let q = params.q;
    if let Some(p) = plan {
        if p.total_sites != 2 * nbf && p.total_sites != 2 * nbf + params.n {
            return Err(Error::SiteCountMismatch { plan: p.total_sites, target: 2 * nbf });
        }
    }
    let ft = pre_process(f, params)?;
    let gt = pre_process(g, params)?;
    let ef = encode_shift_combine(&ft, coding);
    let eg = encode_shift_combine(&gt, coding);

    let fs = match plan {
        Some(p) => {
            let mut w = PlanWindow::new(p, 0, nbf, q);
            ntt_forward_with(&ef, params, Some(&mut w))?
        }
        None => ntt_forward_with(&ef, params, None)?,
    };
    let gs = match plan {
        Some(p) => {
            let mut w = PlanWindow::new(p, nbf, nbf, q);
            ntt_forward_with(&eg, params, Some(&mut w))?
        }
        None => ntt_forward_with(&eg, params, None)?,
    };
    let product = match plan {
        Some(p) if p.total_sites == 2 * nbf + params.n => {
            let mut w = PlanWindow::new(p, 2 * nbf, params.n, q);
            pointwise_mul_with(&fs, &gs, q, Some(&mut w))?
        }
        _ => pointwise_mul_with(&fs, &gs, q, None)?,
    };
    let decoded = decode_spectrum(&product, coding, DecodePower::Square)?;
    let verdict = checksum_nwc(&ft, &gt, decoded.values.coeffs[0], q);
    Ok((decoded, verdict))
}

/// Recomputation with shifted operands around the pre-scaling multiplier
/// array: pass one assigns element i to slot i, pass two rotates the
/// assignment by one slot, and the de-rotated results are compared
/// element-wise. A sticky faulty slot corrupts different elements in the two
/// passes, so any mismatch flags. Faults in the plan apply to both passes.
///
/// Returns the pass-one output (the functional result) and the verdict; the
/// verdict's residues are the first differing element pair, or (0, 0) when
/// the passes agree.
pub fn preprocess_reso_check(
    f: &PolyZq,
    params: &NttDomainParams,
    plan: Option<&FaultPlan>,
) -> Result<(PolyZq, DetectionVerdict)> {
    if let Some(p) = plan {
        if p.total_sites != params.n {
            return Err(Error::SiteCountMismatch { plan: p.total_sites, target: params.n });
        }
    }
    let run = |rotation: usize| -> Result<PolyZq> {
        match plan {
            Some(p) => {
                let mut w = PlanWindow::new(p, 0, params.n, params.q);
                pre_process_slots(f, params, rotation, Some(&mut w))
            }
            None => pre_process_slots(f, params, rotation, None),
        }
    };
    let pass1 = run(0)?;
    let pass2 = run(1)?;
    let verdict = match pass1.coeffs.iter().zip(&pass2.coeffs).find(|(a, b)| a != b) {
        Some((&a, &b)) => DetectionVerdict::compare(a, b),
        None => DetectionVerdict::compare(0, 0),
    };
    Ok((pass1, verdict))
}
