//! Construction of one supply-chain random network sample.
//!
//! The topology is a stack of two bipartite configuration-model multigraphs
//! (suppliers→wholesalers and wholesalers→retailers) plus a partition of the
//! wholesalers into horizontal capacity-sharing groups. Degree sequences are
//! drawn from the configured families, repaired until both sides of each
//! layer carry the same stub count, screened by the 5% mean-gap filter, and
//! matched either uniformly at random or rank-aligned (assortative).

use crate::config::{HorizontalPolicy, ScenarioConfig};
use crate::degree::{sample_degree_sequence, DegreeDistributionSpec, DegreeSequence, Family, Role};
use crate::error::{Result, ScrnError};
use rand::seq::SliceRandom;
use rand::Rng;

/// Redraw-step cap for consistency repair.
const REPAIR_CAP: u64 = 1_000_000;
/// Cap on consecutive samples rejected by the mean-gap filter.
const REJECTION_CAP: u64 = 10_000;

/// Node counts of the three tiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TierSizes {
    pub n_suppliers: usize,
    pub n_wholesalers: usize,
    pub n_retailers: usize,
}

impl TierSizes {
    /// Suppliers per wholesaler, α = N_s/N_w.
    pub fn alpha(&self) -> f64 {
        self.n_suppliers as f64 / self.n_wholesalers as f64
    }

    /// Retailers per wholesaler, β = N_r/N_w.
    pub fn beta(&self) -> f64 {
        self.n_retailers as f64 / self.n_wholesalers as f64
    }
}

/// One bipartite multigraph layer. Parallel edges are retained; each is a
/// distinct one-unit trading relationship.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteLayer {
    /// (upstream node id, downstream node id), one entry per relationship.
    pub edges: Vec<(u32, u32)>,
    pub upstream_degrees: DegreeSequence,
    pub downstream_degrees: DegreeSequence,
}

impl BipartiteLayer {
    /// Check that the realized multigraph degrees equal the drawn sequences.
    pub fn degrees_preserved(&self) -> bool {
        let mut up = vec![0u32; self.upstream_degrees.len()];
        let mut down = vec![0u32; self.downstream_degrees.len()];
        for &(u, d) in &self.edges {
            up[u as usize] += 1;
            down[d as usize] += 1;
        }
        up == self.upstream_degrees.degrees && down == self.downstream_degrees.degrees
    }
}

/// A complete three-tier network sample.
#[derive(Debug, Clone, PartialEq)]
pub struct SupplyNetwork {
    pub tiers: TierSizes,
    /// Suppliers → wholesalers.
    pub layer_sw: BipartiteLayer,
    /// Wholesalers → retailers.
    pub layer_wr: BipartiteLayer,
    /// Group id per wholesaler; singleton groups mean no horizontal link.
    pub horizontal_groups: Vec<u32>,
}

/// Draw one degree sequence per side of a layer and repair until the sums
/// match: while they differ, one uniformly random node from each tier has its
/// degree redrawn.
///
/// Precondition: the nominal stub counts agree, `mean_up·n_up = mean_down·n_down`.
pub fn draw_consistent_sequences<R: Rng + ?Sized>(
    spec_up: &DegreeDistributionSpec,
    role_up: Role,
    n_up: usize,
    spec_down: &DegreeDistributionSpec,
    role_down: Role,
    n_down: usize,
    rng: &mut R,
) -> Result<(DegreeSequence, DegreeSequence)> {
    let nominal_up = spec_up.target_mean * n_up as f64;
    let nominal_down = spec_down.target_mean * n_down as f64;
    if (nominal_up - nominal_down).abs() > 1e-9 * nominal_up.max(1.0) {
        return Err(ScrnError::ConfigInvalid(format!(
            "inconsistent layer means: {} × {n_up} ≠ {} × {n_down}",
            spec_up.target_mean, spec_down.target_mean
        )));
    }
    let mut up = sample_degree_sequence(spec_up, role_up, n_up, rng)?;
    let mut down = sample_degree_sequence(spec_down, role_down, n_down, rng)?;
    let mut steps = 0u64;
    while up.sum() != down.sum() {
        if steps >= REPAIR_CAP {
            return Err(ScrnError::RepairExhausted(steps));
        }
        let iu = rng.gen_range(0..n_up);
        let id = rng.gen_range(0..n_down);
        up.degrees[iu] = spec_up.sample_one(rng)?;
        down.degrees[id] = spec_down.sample_one(rng)?;
        steps += 1;
    }
    Ok((up, down))
}

/// One-sided repair: redraw single random entries of `seq` until its sum hits
/// `target`. Used when the opposite side of the layer is already fixed.
pub fn repair_to_sum<R: Rng + ?Sized>(
    spec: &DegreeDistributionSpec,
    seq: &mut DegreeSequence,
    target: u64,
    rng: &mut R,
) -> Result<()> {
    if spec.family == Family::Regular && seq.sum() != target {
        // A regular sequence has a deterministic sum; no redraw can move it.
        return Err(ScrnError::RepairExhausted(0));
    }
    let n = seq.len();
    let mut steps = 0u64;
    while seq.sum() != target {
        if steps >= REPAIR_CAP {
            return Err(ScrnError::RepairExhausted(steps));
        }
        let i = rng.gen_range(0..n);
        seq.degrees[i] = spec.sample_one(rng)?;
        steps += 1;
    }
    Ok(())
}

/// Configuration-model matching: each node owns stubs equal to its degree and
/// a uniformly random permutation pairs upstream stubs to downstream stubs.
/// Multi-edges are retained.
pub fn match_stubs_random<R: Rng + ?Sized>(
    up_seq: DegreeSequence,
    down_seq: DegreeSequence,
    rng: &mut R,
) -> Result<BipartiteLayer> {
    check_stub_sums(&up_seq, &down_seq)?;
    let up_stubs = stub_list_id_order(&up_seq);
    let mut down_stubs = stub_list_id_order(&down_seq);
    down_stubs.shuffle(rng);
    let edges = up_stubs.into_iter().zip(down_stubs).collect();
    Ok(BipartiteLayer {
        edges,
        upstream_degrees: up_seq,
        downstream_degrees: down_seq,
    })
}

/// Rank-aligned (assortative) matching: both sides lay out their stubs in
/// blocks sorted by descending degree (ties by ascending node id) and stubs
/// are paired positionally, so the highest-degree upstream node trades with
/// the highest-degree downstream nodes. Deterministic.
pub fn match_stubs_ordered(
    up_seq: DegreeSequence,
    down_seq: DegreeSequence,
) -> Result<BipartiteLayer> {
    check_stub_sums(&up_seq, &down_seq)?;
    let up_stubs = stub_list_rank_order(&up_seq);
    let down_stubs = stub_list_rank_order(&down_seq);
    let edges = up_stubs.into_iter().zip(down_stubs).collect();
    Ok(BipartiteLayer {
        edges,
        upstream_degrees: up_seq,
        downstream_degrees: down_seq,
    })
}

fn check_stub_sums(up: &DegreeSequence, down: &DegreeSequence) -> Result<()> {
    if up.sum() != down.sum() {
        return Err(ScrnError::ConfigInvalid(format!(
            "stub sums differ: {} upstream vs {} downstream",
            up.sum(),
            down.sum()
        )));
    }
    Ok(())
}

fn stub_list_id_order(seq: &DegreeSequence) -> Vec<u32> {
    let mut stubs = Vec::with_capacity(seq.sum() as usize);
    for (i, &d) in seq.degrees.iter().enumerate() {
        stubs.extend(std::iter::repeat(i as u32).take(d as usize));
    }
    stubs
}

fn stub_list_rank_order(seq: &DegreeSequence) -> Vec<u32> {
    let mut order: Vec<usize> = (0..seq.len()).collect();
    order.sort_by_key(|&i| (std::cmp::Reverse(seq.degrees[i]), i));
    let mut stubs = Vec::with_capacity(seq.sum() as usize);
    for i in order {
        stubs.extend(std::iter::repeat(i as u32).take(seq.degrees[i] as usize));
    }
    stubs
}

/// Comonotone assignment of wholesaler in/out degrees: both sequences are
/// sorted descending so node id order carries descending degree and
/// rank(in-degree) = rank(out-degree) for every wholesaler.
pub fn couple_wholesaler_degrees(
    in_seq: DegreeSequence,
    out_seq: DegreeSequence,
) -> Result<(DegreeSequence, DegreeSequence)> {
    if in_seq.len() != out_seq.len() {
        return Err(ScrnError::LengthMismatch {
            left: in_seq.len(),
            right: out_seq.len(),
        });
    }
    let mut ins = in_seq.degrees;
    let mut outs = out_seq.degrees;
    ins.sort_by_key(|&d| std::cmp::Reverse(d));
    outs.sort_by_key(|&d| std::cmp::Reverse(d));
    Ok((
        DegreeSequence::new(ins, in_seq.role),
        DegreeSequence::new(outs, out_seq.role),
    ))
}

/// True iff the sample mean deviates from the target by at most `threshold`
/// (relative, boundary inclusive — a tiny absolute slack keeps means that
/// sit exactly on the boundary inside despite rounding).
pub fn mean_gap_ok(seq: &DegreeSequence, target_mean: f64, threshold: f64) -> bool {
    (seq.mean() - target_mean).abs() <= target_mean * threshold + 1e-12
}

/// Select round(ρ·N_w) wholesalers uniformly at random and group them
/// according to `policy`; everyone else stays a singleton. Group ids are the
/// minimum member id, so the labeling is deterministic given the selection.
pub fn assign_horizontal_groups<R: Rng + ?Sized>(
    n_wholesalers: usize,
    rho: f64,
    policy: HorizontalPolicy,
    rng: &mut R,
) -> Vec<u32> {
    let mut groups: Vec<u32> = (0..n_wholesalers as u32).collect();
    let k = (rho * n_wholesalers as f64).round() as usize;
    if k < 2 {
        return groups;
    }
    let selected: Vec<usize> = rand::seq::index::sample(rng, n_wholesalers, k).into_vec();
    match policy {
        HorizontalPolicy::Coalition => {
            let label = *selected.iter().min().expect("k ≥ 2") as u32;
            for &w in &selected {
                groups[w] = label;
            }
        }
        HorizontalPolicy::Pairs => {
            for pair in selected.chunks_exact(2) {
                let label = pair[0].min(pair[1]) as u32;
                groups[pair[0]] = label;
                groups[pair[1]] = label;
            }
        }
    }
    groups
}

/// Build one network sample for the scenario.
///
/// Returns the network and the number of samples the mean-gap filter
/// rejected before this one was accepted.
///
/// Construction, in order:
/// 1. supplier-out and wholesaler-in sequences, drawn consistently
///    (suppliers are Regular mean 1);
/// 2. wholesaler-out: when `coupled`, derived proportionally as
///    out = (β·k̄_r^in / α)·in, which ties the two wholesaler roles
///    comonotonically and keeps each wholesaler's distribution capacity in
///    step with its retail side; when uncoupled, drawn independently and
///    repaired against a fresh retailer sequence;
/// 3. retailer-in, repaired until total demand equals total wholesaler
///    out-stubs;
/// 4. the 5% mean-gap filter on wholesaler-out and retailer-in (reject and
///    redraw the whole sample on failure);
/// 5. retailer ids are assigned in descending in-degree order — the paper's
///    retailer hierarchy serves the largest buyers first;
/// 6. stub matching (supplier layer always random; retail layer random or
///    rank-ordered) and horizontal group assignment.
pub fn build_network<R: Rng + ?Sized>(
    config: &ScenarioConfig,
    rng: &mut R,
) -> Result<(SupplyNetwork, u64)> {
    config.validate()?;
    let tiers = TierSizes {
        n_suppliers: config.n_suppliers(),
        n_wholesalers: config.n_wholesalers,
        n_retailers: config.n_retailers(),
    };
    let supplier_spec = DegreeDistributionSpec::new(
        Family::Regular,
        config.supplier_mean_out_degree(),
        tiers.n_wholesalers,
    )?;
    let wholesaler_in_spec = DegreeDistributionSpec::new(
        config.wholesaler_dist,
        config.wholesaler_mean_in_degree(),
        tiers.n_suppliers,
    )?;
    let retailer_spec = DegreeDistributionSpec::new(
        config.retailer_dist,
        config.retailer_mean_in_degree,
        tiers.n_wholesalers,
    )?;
    let wholesaler_out_spec = if config.coupled {
        None
    } else {
        Some(DegreeDistributionSpec::new(
            config.wholesaler_dist,
            config.wholesaler_mean_out_degree(),
            tiers.n_retailers,
        )?)
    };

    let mut rejected = 0u64;
    loop {
        if rejected >= REJECTION_CAP {
            return Err(ScrnError::RejectionExhausted(rejected));
        }
        let (supplier_out, wholesaler_in) = draw_consistent_sequences(
            &supplier_spec,
            Role::SupplierOut,
            tiers.n_suppliers,
            &wholesaler_in_spec,
            Role::WholesalerIn,
            tiers.n_wholesalers,
            rng,
        )?;
        let (wholesaler_out, mut retailer_in) = if config.coupled {
            let ratio = config.coupling_ratio().round() as u32;
            let out = DegreeSequence::new(
                wholesaler_in.degrees.iter().map(|&d| d * ratio).collect(),
                Role::WholesalerOut,
            );
            let mut rin =
                sample_degree_sequence(&retailer_spec, Role::RetailerIn, tiers.n_retailers, rng)?;
            repair_to_sum(&retailer_spec, &mut rin, out.sum(), rng)?;
            (out, rin)
        } else {
            let spec_out = wholesaler_out_spec.as_ref().expect("uncoupled");
            draw_consistent_sequences(
                spec_out,
                Role::WholesalerOut,
                tiers.n_wholesalers,
                &retailer_spec,
                Role::RetailerIn,
                tiers.n_retailers,
                rng,
            )?
        };
        if !mean_gap_ok(
            &wholesaler_out,
            config.wholesaler_mean_out_degree(),
            config.gap_threshold,
        ) || !mean_gap_ok(
            &retailer_in,
            config.retailer_mean_in_degree,
            config.gap_threshold,
        ) {
            rejected += 1;
            continue;
        }
        // Retailer ids carry descending demand: the sequential allocation
        // sweep then serves the largest buyers first.
        retailer_in
            .degrees
            .sort_by_key(|&d| std::cmp::Reverse(d));

        let layer_sw = match_stubs_random(supplier_out, wholesaler_in, rng)?;
        let layer_wr = if config.ordered {
            match_stubs_ordered(wholesaler_out, retailer_in)?
        } else {
            match_stubs_random(wholesaler_out, retailer_in, rng)?
        };
        let horizontal_groups = assign_horizontal_groups(
            tiers.n_wholesalers,
            config.rho,
            config.horizontal_policy,
            rng,
        );
        let network = SupplyNetwork {
            tiers,
            layer_sw,
            layer_wr,
            horizontal_groups,
        };
        return Ok((network, rejected));
    }
}
