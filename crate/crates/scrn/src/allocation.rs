//! Capacity computation and the sequential order/supply allocation.
//!
//! Every retailer orders one unit per in-link. Retailers are served in
//! node-id order (the retailer hierarchy: r has preference over every
//! r' > r); each retailer draws from its linked wholesalers in ascending
//! wholesaler id, taking `min(remaining demand, group remaining capacity)`
//! from each group until satisfied or out of links. Parallel edges to the
//! same wholesaler collapse into one visit — the outcome is provably the
//! same since the state is the same group pool. Whatever demand is left
//! after the last linked wholesaler accrues to the unfulfilled total `e`,
//! and agility is measured as OFR = 1 − e/D.

use crate::error::{Result, ScrnError};
use crate::network::SupplyNetwork;
use std::collections::BTreeMap;

/// Numerical tolerance for real-valued quantity comparisons.
pub const QUANTITY_EPS: f64 = 1e-9;

/// Supplier unit capacity plus the remaining distribution capacity per
/// wholesaler group.
#[derive(Debug, Clone, PartialEq)]
pub struct CapacityState {
    /// Units produced by each supplier.
    pub supplier_capacity: f64,
    /// Remaining units per group id; a singleton wholesaler's group capacity
    /// is its in-degree times the supplier capacity.
    pub group_capacity: BTreeMap<u32, f64>,
}

/// Per-retailer demand (one unit per in-link) and its total.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DemandVector {
    pub per_retailer: Vec<u32>,
    pub total: u64,
}

impl DemandVector {
    /// Read demand off the realized retailer in-degrees.
    pub fn from_network(network: &SupplyNetwork) -> DemandVector {
        let per_retailer = network.layer_wr.downstream_degrees.degrees.clone();
        let total = per_retailer.iter().map(|&d| d as u64).sum();
        DemandVector {
            per_retailer,
            total,
        }
    }
}

/// Outcome of one allocation run.
#[derive(Debug, Clone, PartialEq)]
pub struct AllocationResult {
    /// Total demand.
    pub d: u64,
    /// Total unfulfilled orders.
    pub e: f64,
    /// Order fulfillment rate, 1 − e/D.
    pub ofr: f64,
    /// Unmet demand per retailer (only retailers with a shortfall appear).
    pub shortfall_per_retailer: BTreeMap<u32, f64>,
    /// Units shipped per wholesaler (attributed to the visited wholesaler,
    /// even when capacity is drawn from a shared group pool).
    pub shipped_per_wholesaler: BTreeMap<u32, f64>,
}

/// Supplier capacity from the realized balance: c_s = D / N_s, so total
/// supply equals total demand exactly in every sample.
pub fn compute_supplier_capacity(network: &SupplyNetwork) -> f64 {
    let d = network.layer_wr.edges.len() as f64;
    d / network.tiers.n_suppliers as f64
}

/// Initial capacities: each wholesaler holds (supplier-layer in-degree)·c_s
/// units and groups pool their members' capacity.
pub fn initial_capacities(network: &SupplyNetwork, c_s: f64) -> CapacityState {
    let mut group_capacity = BTreeMap::new();
    for (w, &in_deg) in network.layer_sw.downstream_degrees.degrees.iter().enumerate() {
        let group = network.horizontal_groups[w];
        *group_capacity.entry(group).or_insert(0.0) += in_deg as f64 * c_s;
    }
    CapacityState {
        supplier_capacity: c_s,
        group_capacity,
    }
}

/// Run the sequential allocation. Deterministic: identical inputs give a
/// bit-identical result.
pub fn allocate(
    network: &SupplyNetwork,
    caps: &CapacityState,
    demand: &DemandVector,
) -> AllocationResult {
    // Linked wholesalers per retailer, ascending id, parallels collapsed.
    let n_retailers = network.tiers.n_retailers;
    let mut links: Vec<Vec<u32>> = vec![Vec::new(); n_retailers];
    for &(w, r) in &network.layer_wr.edges {
        links[r as usize].push(w);
    }
    for l in &mut links {
        l.sort_unstable();
        l.dedup();
    }

    let mut remaining = caps.group_capacity.clone();
    let mut shipped_per_wholesaler: BTreeMap<u32, f64> = BTreeMap::new();
    let mut shortfall_per_retailer: BTreeMap<u32, f64> = BTreeMap::new();
    let mut e = 0.0;
    for (r, linked) in links.iter().enumerate() {
        let mut need = demand.per_retailer[r] as f64;
        for &w in linked {
            if need <= QUANTITY_EPS {
                break;
            }
            let group = network.horizontal_groups[w as usize];
            let pool = remaining.get_mut(&group).expect("group exists");
            let take = need.min(*pool);
            if take > 0.0 {
                *pool -= take;
                need -= take;
                *shipped_per_wholesaler.entry(w).or_insert(0.0) += take;
            }
        }
        if need > QUANTITY_EPS {
            shortfall_per_retailer.insert(r as u32, need);
            e += need;
        }
    }
    let d = demand.total;
    let ofr = if d == 0 { 1.0 } else { 1.0 - e / d as f64 };
    debug_assert!((-QUANTITY_EPS..=1.0 + QUANTITY_EPS).contains(&ofr));
    AllocationResult {
        d,
        e,
        ofr,
        shortfall_per_retailer,
        shipped_per_wholesaler,
    }
}

/// OFR = 1 − e/D of a completed run; errors on zero demand.
pub fn compute_ofr(result: &AllocationResult) -> Result<f64> {
    if result.d == 0 {
        return Err(ScrnError::ZeroDemand);
    }
    let ofr = 1.0 - result.e / result.d as f64;
    debug_assert!((-QUANTITY_EPS..=1.0 + QUANTITY_EPS).contains(&ofr));
    Ok(ofr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::degree::{DegreeSequence, Role};
    use crate::network::{BipartiteLayer, TierSizes};

    /// Assemble a wholesaler→retailer test network by hand. The supplier
    /// layer is synthesized so each wholesaler's in-degree equals the given
    /// capacity units (c_s = 1).
    pub(crate) fn toy_network(
        wholesaler_caps: &[u32],
        retailer_links: &[Vec<u32>],
        groups: Option<Vec<u32>>,
    ) -> (SupplyNetwork, CapacityState, DemandVector) {
        let n_w = wholesaler_caps.len();
        let n_r = retailer_links.len();
        let n_s: u32 = wholesaler_caps.iter().sum();
        let mut sw_edges = Vec::new();
        let mut s = 0;
        for (w, &c) in wholesaler_caps.iter().enumerate() {
            for _ in 0..c {
                sw_edges.push((s, w as u32));
                s += 1;
            }
        }
        let mut wr_edges = Vec::new();
        let mut w_out = vec![0u32; n_w];
        let mut r_in = vec![0u32; n_r];
        for (r, linked) in retailer_links.iter().enumerate() {
            for &w in linked {
                wr_edges.push((w, r as u32));
                w_out[w as usize] += 1;
                r_in[r] += 1;
            }
        }
        let network = SupplyNetwork {
            tiers: TierSizes {
                n_suppliers: n_s as usize,
                n_wholesalers: n_w,
                n_retailers: n_r,
            },
            layer_sw: BipartiteLayer {
                edges: sw_edges,
                upstream_degrees: DegreeSequence::new(vec![1; n_s as usize], Role::SupplierOut),
                downstream_degrees: DegreeSequence::new(
                    wholesaler_caps.to_vec(),
                    Role::WholesalerIn,
                ),
            },
            layer_wr: BipartiteLayer {
                edges: wr_edges,
                upstream_degrees: DegreeSequence::new(w_out, Role::WholesalerOut),
                downstream_degrees: DegreeSequence::new(r_in.clone(), Role::RetailerIn),
            },
            horizontal_groups: groups.unwrap_or_else(|| (0..n_w as u32).collect()),
        };
        let caps = initial_capacities(&network, 1.0);
        let demand = DemandVector::from_network(&network);
        (network, caps, demand)
    }

    #[test]
    fn hand_traced_instance() {
        // Wholesaler caps (2, 2); retailer A demands 3 with links only to
        // wholesaler 0; retailer B demands 1 with a link to wholesaler 1.
        let (net, caps, demand) =
            toy_network(&[2, 2], &[vec![0, 0, 0], vec![1]], None);
        let result = allocate(&net, &caps, &demand);
        assert_eq!(result.d, 4);
        assert_eq!(result.e, 1.0);
        assert_eq!(result.ofr, 0.75);
        assert_eq!(result.shipped_per_wholesaler[&0], 2.0);
        assert_eq!(result.shipped_per_wholesaler[&1], 1.0);
        assert_eq!(result.shortfall_per_retailer[&0], 1.0);
    }

    #[test]
    fn trivial_chain_fulfills_everything() {
        let (net, caps, demand) = toy_network(&[1], &[vec![0]], None);
        let result = allocate(&net, &caps, &demand);
        assert_eq!(result.e, 0.0);
        assert_eq!(result.ofr, 1.0);
    }

    #[test]
    fn single_coalition_group_fulfills_balanced_demand() {
        // Capacity placement is useless to retailer 1 without pooling; with
        // one shared group every unit is reachable and OFR = 1.
        let (net, caps, demand) = toy_network(
            &[3, 1],
            &[vec![0], vec![1, 1, 1]],
            Some(vec![0, 0]),
        );
        let result = allocate(&net, &caps, &demand);
        assert_eq!(result.e, 0.0);
        assert_eq!(result.ofr, 1.0);
    }

    #[test]
    fn conservation_and_capacity_respect() {
        let (net, caps, demand) = toy_network(
            &[2, 1, 3],
            &[vec![0, 1], vec![0, 0, 2], vec![2], vec![1, 2]],
            None,
        );
        let result = allocate(&net, &caps, &demand);
        let shipped: f64 = result.shipped_per_wholesaler.values().sum();
        assert!((shipped + result.e - result.d as f64).abs() < QUANTITY_EPS);
        for (w, &s) in &result.shipped_per_wholesaler {
            let cap = net.layer_sw.downstream_degrees.degrees[*w as usize] as f64;
            assert!(s <= cap + QUANTITY_EPS);
        }
    }

    #[test]
    fn compute_ofr_examples() {
        let (net, caps, demand) = toy_network(&[2, 2], &[vec![0, 0, 0], vec![1]], None);
        let result = allocate(&net, &caps, &demand);
        assert_eq!(compute_ofr(&result).unwrap(), 0.75);

        let zero = AllocationResult {
            d: 0,
            e: 0.0,
            ofr: 1.0,
            shortfall_per_retailer: BTreeMap::new(),
            shipped_per_wholesaler: BTreeMap::new(),
        };
        assert!(matches!(compute_ofr(&zero), Err(ScrnError::ZeroDemand)));

        let total_failure = AllocationResult {
            d: 5,
            e: 5.0,
            ofr: 0.0,
            shortfall_per_retailer: BTreeMap::new(),
            shipped_per_wholesaler: BTreeMap::new(),
        };
        assert_eq!(compute_ofr(&total_failure).unwrap(), 0.0);
    }

    #[test]
    fn parallel_edges_collapse_into_one_visit() {
        // Retailer 0 holds two parallel links to wholesaler 0 (cap 1): the
        // single visit drains the pool once; demand 2 leaves shortfall 1.
        let (net, caps, demand) = toy_network(&[1], &[vec![0, 0]], None);
        let result = allocate(&net, &caps, &demand);
        assert_eq!(result.e, 1.0);
        assert_eq!(result.ofr, 0.5);
    }

    #[test]
    fn supplier_capacity_from_realized_balance() {
        let (net, _, _) = toy_network(&[2, 2], &[vec![0, 0, 0], vec![1]], None);
        // D = 4 demand units over 4 suppliers.
        assert_eq!(compute_supplier_capacity(&net), 1.0);
    }

    #[test]
    fn merging_two_groups_can_reduce_ofr() {
        // Sequential precedence means pooling is not always beneficial:
        // retailer 0 (demand 4, links to all) drains wholesaler 2's capacity
        // through the shared pool, starving retailer 1 (demand 5, linked only
        // to wholesaler 2). Merging ALL groups is still optimal (see the
        // dominance property test).
        let caps = [1, 4, 4];
        let links = vec![vec![0, 1, 2, 0], vec![2, 2, 2, 2, 2]];
        let (net, c, d) = toy_network(&caps, &links, None);
        let separate = allocate(&net, &c, &d);
        let (net2, c2, d2) = toy_network(&caps, &links, Some(vec![0, 1, 0]));
        let merged = allocate(&net2, &c2, &d2);
        assert!(merged.e > separate.e);
    }
}
