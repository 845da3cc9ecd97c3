//! Deterministic, seedable fault injection for instrumented executions.
//!
//! A [`FaultPlan`] is a sorted list of per-site events, fully determined by
//! its seed. Sites are flat indices in the visit order of the target
//! execution: butterfly index for the transform kernels, slot index for the
//! multiplier arrays. Pipelines that chain several fault targets (e.g. two
//! transforms plus a component-wise multiplier array) concatenate the site
//! ranges, so one plan covers the whole execution.
//!
//! Two occurrence modes are implemented. Normal mode makes every site
//! independently faulty with probability faults/sites; the realized count is
//! therefore binomial with mean `faults`. Burst mode picks a uniform start
//! site and corrupts every site from there on.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kyber::{KyberNttVector, KyberPoly, KYBER_BUTTERFLIES};
use crate::ntt::{ntt_forward_with, pointwise_mul_with, pre_process_slots, NttOutput};
use crate::zq::{NttDomainParams, PolyZq};

/// Which of a butterfly's three arithmetic results is corrupted:
/// the twiddle product t, the sum u + t, or the difference u - t.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FaultPosition {
    P1,
    P2,
    P3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FaultMode {
    Normal,
    Burst,
}

/// How a fault event maps the correct value to a corrupted one. Every model
/// guarantees the corrupted value differs from the correct one; all of them
/// derive the corruption deterministically from the event's stored delta.
///
/// The value distribution of a fault is the one free parameter of the
/// coverage measurements, so alternatives to the additive default are kept
/// around for sensitivity comparisons.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CorruptionModel {
    /// value + delta mod q, delta uniform in [1, q).
    #[default]
    Additive,
    /// Replace with a uniform value over [0, q) \ {value}.
    RandomValue,
    /// Flip one bit of the binary representation, reduced back into [0, q).
    BitFlip,
}

impl std::fmt::Display for CorruptionModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CorruptionModel::Additive => "additive",
            CorruptionModel::RandomValue => "random-value",
            CorruptionModel::BitFlip => "bitflip",
        })
    }
}

/// One corrupted site. `delta` is nonzero and below q; the corruption model
/// decides how it is applied. `position` selects the butterfly output for
/// butterfly sites and is ignored by single-output multiplier slots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaultEvent {
    pub site: usize,
    pub position: FaultPosition,
    pub delta: u32,
}

/// A deterministic list of fault events for one execution, sorted by site
/// with at most one event per site.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaultPlan {
    pub mode: FaultMode,
    pub model: CorruptionModel,
    pub seed: u64,
    /// Size of the site universe this plan was built for.
    pub total_sites: usize,
    /// Normal mode: the requested mean fault count F. Burst mode: the
    /// nominal label of the campaign row; the realized count is
    /// `events.len()`.
    pub requested_faults: usize,
    pub events: Vec<FaultEvent>,
}

impl FaultPlan {
    pub fn empty(total_sites: usize) -> Self {
        Self {
            mode: FaultMode::Normal,
            model: CorruptionModel::Additive,
            seed: 0,
            total_sites,
            requested_faults: 0,
            events: Vec::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Number of sites actually corrupted.
    pub fn actual_faults(&self) -> usize {
        self.events.len()
    }
}

/// Normal-mode plan: each of the `total_sites` sites is independently faulty
/// with probability faults/total_sites; faulty sites get a uniform position
/// and a uniform nonzero delta.
pub fn build_fault_plan_normal(
    faults: usize,
    total_sites: usize,
    seed: u64,
    q: u32,
    model: CorruptionModel,
) -> Result<FaultPlan> {
    if faults > total_sites {
        return Err(Error::InvalidFaultCount { faults, sites: total_sites });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut events = Vec::new();
    for site in 0..total_sites {
        if rng.gen_range(0..total_sites as u64) < faults as u64 {
            events.push(draw_event(site, q, &mut rng));
        }
    }
    Ok(FaultPlan {
        mode: FaultMode::Normal,
        model,
        seed,
        total_sites,
        requested_faults: faults,
        events,
    })
}

/// Burst-mode plan: a uniform start site, then every site from the start
/// onward carries an event. `burst_label` is recorded for reporting; the
/// realized fault count is total_sites - start.
pub fn build_fault_plan_burst(
    total_sites: usize,
    burst_label: usize,
    seed: u64,
    q: u32,
    model: CorruptionModel,
) -> Result<FaultPlan> {
    if total_sites == 0 {
        return Err(Error::InvalidFaultCount { faults: burst_label, sites: 0 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = rng.gen_range(0..total_sites);
    let events = (start..total_sites).map(|s| draw_event(s, q, &mut rng)).collect();
    Ok(FaultPlan {
        mode: FaultMode::Burst,
        model,
        seed,
        total_sites,
        requested_faults: burst_label,
        events,
    })
}

fn draw_event(site: usize, q: u32, rng: &mut ChaCha8Rng) -> FaultEvent {
    let position = match rng.gen_range(0..3u8) {
        0 => FaultPosition::P1,
        1 => FaultPosition::P2,
        _ => FaultPosition::P3,
    };
    FaultEvent { site, position, delta: rng.gen_range(1..q) }
}

/// Additive corruption: (value + delta) mod q, never equal to the input.
pub fn corrupt(value: u32, event: &FaultEvent, q: u32) -> u32 {
    apply_model(value, event.delta, q, CorruptionModel::Additive)
}

/// Applies the plan's corruption model. Every branch guarantees the result
/// differs from `value`.
pub(crate) fn apply_model(value: u32, delta: u32, q: u32, model: CorruptionModel) -> u32 {
    debug_assert!(value < q && delta >= 1 && delta < q);
    match model {
        CorruptionModel::Additive => {
            let s = value + delta;
            if s >= q {
                s - q
            } else {
                s
            }
        }
        CorruptionModel::RandomValue => {
            // delta - 1 is uniform over [0, q-1); skipping the current value
            // makes the result uniform over the other q-1 residues.
            let r = delta - 1;
            if r >= value {
                r + 1
            } else {
                r
            }
        }
        CorruptionModel::BitFlip => {
            let bits = 32 - (q - 1).leading_zeros();
            let flipped = value ^ (1 << (delta % bits));
            if flipped >= q {
                flipped - q
            } else {
                flipped
            }
        }
    }
}

/// A cursor over the slice of a plan's events that lands in one execution
/// range; local site s maps to global site base + s. Kernels visit sites in
/// ascending order, so lookups advance monotonically.
pub(crate) struct PlanWindow<'a> {
    events: &'a [FaultEvent],
    next: usize,
    base: usize,
    q: u32,
    model: CorruptionModel,
    applied: usize,
}

impl<'a> PlanWindow<'a> {
    /// Window over global sites [base, base + len).
    pub(crate) fn new(plan: &'a FaultPlan, base: usize, len: usize, q: u32) -> Self {
        let lo = plan.events.partition_point(|e| e.site < base);
        let hi = plan.events.partition_point(|e| e.site < base + len);
        Self {
            events: &plan.events[lo..hi],
            next: 0,
            base,
            q,
            model: plan.model,
            applied: 0,
        }
    }

    fn event_at(&mut self, local: usize) -> Option<&'a FaultEvent> {
        let global = self.base + local;
        while self.next < self.events.len() && self.events[self.next].site < global {
            self.next += 1;
        }
        match self.events.get(self.next) {
            Some(e) if e.site == global => Some(e),
            _ => None,
        }
    }

    /// Corrupts `value` iff an event targets (site, pos).
    pub(crate) fn tweak(&mut self, site: usize, pos: FaultPosition, value: u32) -> u32 {
        let (q, model) = (self.q, self.model);
        match self.event_at(site) {
            Some(e) if e.position == pos => {
                self.applied += 1;
                apply_model(value, e.delta, q, model)
            }
            _ => value,
        }
    }

    /// Corrupts `value` iff an event targets this single-output site; the
    /// event's stored position is irrelevant here.
    pub(crate) fn tweak_slot(&mut self, site: usize, value: u32) -> u32 {
        let (q, model) = (self.q, self.model);
        match self.event_at(site) {
            Some(e) => {
                self.applied += 1;
                apply_model(value, e.delta, q, model)
            }
            None => value,
        }
    }

    #[allow(dead_code)]
    pub(crate) fn applied(&self) -> usize {
        self.applied
    }
}

/// Forward transform with faults applied at the plan's butterfly sites.
/// The plan must cover exactly the transform's butterfly count.
pub fn faulty_generic_ntt(
    f: &PolyZq,
    params: &NttDomainParams,
    plan: &FaultPlan,
) -> Result<NttOutput> {
    let expected = params.butterfly_count();
    if plan.total_sites != expected {
        return Err(Error::SiteCountMismatch { plan: plan.total_sites, target: expected });
    }
    let mut window = PlanWindow::new(plan, 0, expected, params.q);
    ntt_forward_with(f, params, Some(&mut window))
}

/// Seven-stage transform with faults at the plan's butterfly sites (896).
pub fn faulty_kyber_ntt(f: &KyberPoly, plan: &FaultPlan) -> Result<KyberNttVector> {
    if plan.total_sites != KYBER_BUTTERFLIES {
        return Err(Error::SiteCountMismatch {
            plan: plan.total_sites,
            target: KYBER_BUTTERFLIES,
        });
    }
    let mut window = PlanWindow::new(plan, 0, KYBER_BUTTERFLIES, crate::kyber::KYBER_Q);
    Ok(crate::kyber::kyber_ntt_with(f, Some(&mut window)))
}

/// Component-wise product with faults at the plan's multiplier slots.
pub fn faulty_pointwise_mul(
    a: &NttOutput,
    b: &NttOutput,
    q: u32,
    plan: &FaultPlan,
) -> Result<NttOutput> {
    let n = a.values.len();
    if plan.total_sites != n {
        return Err(Error::SiteCountMismatch { plan: plan.total_sites, target: n });
    }
    let mut window = PlanWindow::new(plan, 0, n, q);
    pointwise_mul_with(a, b, q, Some(&mut window))
}

/// Pre-scaling pass with faults at the plan's multiplier slots.
pub fn faulty_pre_process(
    f: &PolyZq,
    params: &NttDomainParams,
    plan: &FaultPlan,
) -> Result<PolyZq> {
    if plan.total_sites != params.n {
        return Err(Error::SiteCountMismatch { plan: plan.total_sites, target: params.n });
    }
    let mut window = PlanWindow::new(plan, 0, params.n, params.q);
    pre_process_slots(f, params, 0, Some(&mut window))
}

/// Split-mix style mixer for deriving independent per-trial seeds.
pub(crate) fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
