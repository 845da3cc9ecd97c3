//! Transform-based polynomial multiplication over small prime fields with
//! algorithm-level error detection and a deterministic butterfly-level
//! fault-injection simulator.
//!
//! The crate has three layers:
//!
//! * arithmetic: exact Z_q operations, domain parameter validation
//!   ([`zq`]), the generic iterative transform with negacyclic pre/post
//!   scaling ([`ntt`]), and the seven-stage incomplete transform over
//!   Z_3329 with its degree-one component products ([`kyber`]);
//! * detection: shift-combine coding around the negacyclic component-wise
//!   product and a shifted-operand recomputation for the pre-scaling stage
//!   ([`detect_nwc`]), and lane coding plus a spectrum-sum checksum for the
//!   seven-stage transform ([`detect_kyber`]);
//! * measurement: seedable fault plans applied inside instrumented
//!   executions ([`fault`]), Monte-Carlo coverage campaigns ([`campaign`]),
//!   report emission ([`report`]), and protection-overhead accounting
//!   ([`overhead`]).
//!
//! Everything is deterministic given a seed: plans, campaign trials, and
//! emitted reports replay bit-for-bit, serial or parallel.

pub mod campaign;
pub mod detect_kyber;
pub mod detect_nwc;
pub mod error;
pub mod fault;
pub mod kyber;
pub mod ntt;
pub mod overhead;
pub mod report;
pub mod zq;

pub use campaign::{
    run_campaign, CampaignConfig, CoverageReport, CoverageRow, Environment, Mode, ParamSet, Scheme,
};
pub use detect_kyber::{
    checksum_kyber, decode_kyber, encode_kyber, protected_kyber_ntt, KyberCodingParams,
};
pub use detect_nwc::{
    checksum_nwc, decode_spectrum, encode_shift_combine, preprocess_reso_check,
    protected_nwc_pointwise, shift_combine, CodingParams, DecodePower, DetectionVerdict,
};
pub use error::{Error, Result};
pub use fault::{
    build_fault_plan_burst, build_fault_plan_normal, corrupt, faulty_generic_ntt,
    faulty_kyber_ntt, faulty_pointwise_mul, faulty_pre_process, CorruptionModel, FaultEvent,
    FaultMode, FaultPlan, FaultPosition,
};
pub use kyber::{
    basemul, gamma, kyber_intt, kyber_ntt, kyber_ntt_direct_oracle, kyber_poly_mul,
    KyberNttVector, KyberPoly, KYBER_BUTTERFLIES, KYBER_N, KYBER_OMEGA, KYBER_Q,
};
pub use ntt::{
    ntt_forward, ntt_inverse, nwc_multiply, pointwise_mul, post_process, pre_process,
    rotate_left, schoolbook_negacyclic, NttOutput, Ordering,
};
pub use ntt::executed_butterflies as generic_executed_butterflies;
pub use kyber::executed_butterflies as kyber_executed_butterflies;
pub use overhead::{benchmark_overhead, OverheadSummary, StaticCounts};
pub use report::{emit_report, render_report, ReportFormat};
pub use zq::{
    bit_reverse, find_psi, is_prime, mod_inv, mod_mul, mod_pow, NttDomainParams, NttMatrixOracle,
    PolyZq,
};
