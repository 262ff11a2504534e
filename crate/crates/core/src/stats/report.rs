use std::collections::BTreeMap;

use num_bigint::BigUint;
use serde::Serialize;

use super::{
    imbalance, m0_from_ns, preimage_distribution, pres_bounds, Ddt, NonabelianPolicy, PresBounds,
    Result, StatsError,
};
use crate::bigser;
use crate::func::FuncTable;

/// Every per-function statistic in one record.
///
/// Difference-based fields are `None` for nonabelian groups unless the
/// right-negation convention was requested.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StatsReport {
    pub group: String,
    pub q: usize,
    pub v: usize,
    pub u: usize,
    pub m: Vec<u64>,
    /// `N_s` for `s = 2..=u`.
    #[serde(serialize_with = "bigser::biguint_seq")]
    pub n_s: Vec<BigUint>,
    pub delta: Option<usize>,
    pub nb: u64,
    pub nbb: Option<u64>,
    pub ambiguity: Option<u64>,
    pub alpha: Option<BTreeMap<usize, u64>>,
    pub row_ambiguity: Option<Vec<u64>>,
    pub bounds: PresBounds,
    pub lbub_char: bool,
}

pub fn analyze(f: &FuncTable) -> Result<StatsReport> {
    analyze_with(f, NonabelianPolicy::Reject)
}

/// Builds the report and checks the identities tying its fields together.
pub fn analyze_with(f: &FuncTable, policy: NonabelianPolicy) -> Result<StatsReport> {
    let dist = preimage_distribution(f);
    let q = f.order();
    let n_s = dist.n_sequence();
    let nb = imbalance(f);
    let n2 = n_s.first().cloned().unwrap_or_default();
    if BigUint::from(nb) != n2 {
        return Err(StatsError::IdentityViolation(format!(
            "Nb = {nb} but N_2 = {n2}"
        )));
    }
    // V >= q - N_2/2, i.e. 2V + N_2 >= 2q
    if BigUint::from(2 * dist.v) + &n2 < BigUint::from(2 * q) {
        return Err(StatsError::IdentityViolation(format!(
            "V = {} below q - N_2/2 with N_2 = {n2}",
            dist.v
        )));
    }
    m0_from_ns(f)?;
    let bounds = pres_bounds(f)?;

    let differential = if f.group().is_abelian() || policy == NonabelianPolicy::RightNegation {
        Some(Ddt::compute(f, policy)?)
    } else {
        None
    };
    let (delta, nbb, amb) = match &differential {
        Some(ddt) => {
            let nbb = ddt.derivative_imbalance();
            let amb = ddt.ambiguity();
            if 2 * amb.total != nbb {
                return Err(StatsError::IdentityViolation(format!(
                    "A = {} but NB = {nbb}",
                    amb.total
                )));
            }
            (Some(ddt.differential_uniformity()), Some(nbb), Some(amb))
        }
        None => (None, None, None),
    };
    Ok(StatsReport {
        group: f.group().describe(),
        q,
        v: dist.v,
        u: dist.u,
        m: dist.m,
        n_s,
        delta,
        nb,
        nbb,
        ambiguity: amb.as_ref().map(|a| a.total),
        alpha: amb.as_ref().map(|a| a.alpha.clone()),
        row_ambiguity: amb.map(|a| a.rows),
        bounds,
        lbub_char: bounds.char_holds,
    })
}

impl StatsReport {
    /// Header and single data row:
    /// `q,V,u,M_0..M_u,N_2..N_u,delta,Nb,NB,A,lb,ub`.
    ///
    /// The number of `M_*` and `N_*` columns follows `u`; absent
    /// difference statistics are left empty.
    pub fn to_csv(&self) -> String {
        let mut header: Vec<String> = vec!["q".into(), "V".into(), "u".into()];
        let mut row: Vec<String> = vec![self.q.to_string(), self.v.to_string(), self.u.to_string()];
        for (r, m) in self.m.iter().enumerate() {
            header.push(format!("M_{r}"));
            row.push(m.to_string());
        }
        for (i, n) in self.n_s.iter().enumerate() {
            header.push(format!("N_{}", i + 2));
            row.push(n.to_string());
        }
        let opt = |v: Option<u64>| v.map(|x| x.to_string()).unwrap_or_default();
        header.extend(["delta", "Nb", "NB", "A", "lb", "ub"].map(String::from));
        row.push(opt(self.delta.map(|d| d as u64)));
        row.push(self.nb.to_string());
        row.push(opt(self.nbb));
        row.push(opt(self.ambiguity));
        row.push(self.bounds.lower.to_string());
        row.push(self.bounds.upper.to_string());
        format!("{}\n{}\n", header.join(","), row.join(","))
    }
}
