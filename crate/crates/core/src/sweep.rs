//! Secrecy dimension versus group count at fixed `r`, `h`, `l1`, `l2`,
//! with `k = r g - h`, from the closed-form layer under worst-case placement.

use rayon::prelude::*;

use crate::dss::Scheme;
use crate::error::{Error, Result};
use crate::secrecy::{clamp_hypothesis, secrecy_dim_direct, secrecy_dim_forwarded, worst_case_placement};

pub const CSV_HEADER: &str = "g,k,ks_direct,ks_forwarded,ks_lrc_no_global";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SweepRow {
    pub g: usize,
    pub k: usize,
    pub ks_direct: usize,
    pub ks_forwarded: usize,
    /// Plain LRC (`h = 0`, `k' = r g`) with only static observations.
    pub ks_lrc_no_global: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SweepParams {
    pub r: usize,
    pub h: usize,
    pub l1: usize,
    pub l2: usize,
}

/// One row; the repairing group is group 1 and the forwarding list is
/// `(2, ..., g, 1)`.
pub fn sweep_row(p: SweepParams, g: usize) -> Result<SweepRow> {
    if g == 0 {
        return Err(Error::Constraint("g >= 1 required".into()));
    }
    let (r, h, l1, l2) = (p.r, p.h, p.l1, p.l2);
    if h > r * g {
        return Err(Error::Constraint(format!("h = {h} exceeds n = {}", r * g)));
    }
    let k = r * g - h;
    let flist: Vec<usize> = (2..=g).chain([1]).collect();
    let ks = |scheme: Scheme| -> Result<usize> {
        let placement = match worst_case_placement(g, r, h, k, l1, l2.min(g), scheme, &flist) {
            Ok(pl) => pl,
            Err(Error::Hypothesis(_)) => return Ok(0),
            Err(e) => return Err(e),
        };
        let e = placement.e_vector(r);
        let l1_placed: usize = placement.l1_per_group.iter().sum();
        clamp_hypothesis(match scheme {
            Scheme::Forwarded => {
                secrecy_dim_forwarded(g, r, h, k, l1_placed, &placement.l2_groups, &flist, &e)
            }
            _ => secrecy_dim_direct(g, r, h, k, l1_placed, placement.l2_groups.len(), &e),
        })
    };
    Ok(SweepRow {
        g,
        k,
        ks_direct: ks(Scheme::Direct)?,
        ks_forwarded: ks(Scheme::Forwarded)?,
        ks_lrc_no_global: (r * g).saturating_sub(l2 * r + l1),
    })
}

/// Rows for `g_min..=g_max`, computed in parallel, returned in `g` order.
pub fn sweep(p: SweepParams, g_min: usize, g_max: usize) -> Result<Vec<SweepRow>> {
    if g_min == 0 || g_min > g_max {
        return Err(Error::Constraint(format!(
            "need 1 <= g_min <= g_max, got {g_min}..{g_max}"
        )));
    }
    (g_min..=g_max).into_par_iter().map(|g| sweep_row(p, g)).collect()
}

pub fn to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.g, r.k, r.ks_direct, r.ks_forwarded, r.ks_lrc_no_global
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG5: SweepParams = SweepParams { r: 7, h: 3, l1: 0, l2: 1 };

    #[test]
    fn pinned_rows() {
        let csv = to_csv(&sweep(FIG5, 5, 5).unwrap());
        assert_eq!(csv.lines().nth(1), Some("5,32,16,22,28"));
        let csv = to_csv(&sweep(FIG5, 15, 15).unwrap());
        assert_eq!(csv.lines().nth(1), Some("15,102,56,92,98"));
    }

    #[test]
    fn single_group_is_all_zero() {
        let row = sweep_row(FIG5, 1).unwrap();
        assert_eq!((row.ks_direct, row.ks_forwarded, row.ks_lrc_no_global), (0, 0, 0));
    }

    #[test]
    fn bad_ranges() {
        assert!(sweep(FIG5, 0, 3).is_err());
        assert!(sweep(FIG5, 4, 3).is_err());
    }
}
