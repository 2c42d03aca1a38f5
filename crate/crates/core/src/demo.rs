//! Bounded search for n-th roots with small displacement.
//!
//! For each window `[1, N]` searched, a root `h` of `g` that permutes the
//! window would force the window to be `g`-invariant, and its restriction
//! would be an n-th root of `g`'s restriction in `Sym(N)`. The search only
//! ever speaks about roots that preserve one of the searched windows.

use serde::{Deserialize, Serialize};

use crate::cycles::FinitePerm;
use crate::error::{Error, Result};
use crate::perm::{PermSpec, Window};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBounds {
    pub n: u64,
    pub displacement_budget: u64,
    pub min_window: u64,
    pub max_window: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoundRoot {
    pub window: u64,
    pub displacement: u64,
    pub root: PermSpec,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING-KEBAB-CASE")]
pub enum SearchStatus {
    Found,
    NotFound,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QSearchReport {
    pub target: String,
    pub bounds: SearchBounds,
    pub status: SearchStatus,
    pub windows_searched: u64,
    /// Windows `g` does not map onto themselves: no root preserves them.
    pub not_invariant: u64,
    /// Invariant windows whose cycle type admits no n-th root in `Sym(N)`.
    pub no_root: u64,
    /// Invariant windows with a root in `Sym(N)` whose constructed root
    /// exceeds the budget; other roots there were not enumerated.
    pub over_budget: u64,
    pub found: Option<FoundRoot>,
    pub statement: String,
}

/// `1st`, `2nd`, `3rd`, `4th`, `11th`, `21st`, …
pub fn ordinal(n: u64) -> String {
    let suffix = match (n % 10, n % 100) {
        (_, 11..=13) => "th",
        (1, _) => "st",
        (2, _) => "nd",
        (3, _) => "rd",
        _ => "th",
    };
    format!("{n}{suffix}")
}

pub fn q_search(target: &str, g: &PermSpec, bounds: SearchBounds) -> Result<QSearchReport> {
    if bounds.n == 0 || bounds.min_window == 0 || bounds.min_window > bounds.max_window {
        return Err(Error::Precondition("need n ≥ 1 and 1 ≤ min_window ≤ max_window".into()));
    }
    let mut report = QSearchReport {
        target: target.into(),
        bounds,
        status: SearchStatus::NotFound,
        windows_searched: 0,
        not_invariant: 0,
        no_root: 0,
        over_budget: 0,
        found: None,
        statement: String::new(),
    };
    for size in bounds.min_window..=bounds.max_window {
        let w = Window::new(size)?;
        report.windows_searched += 1;
        if !g.is_invariant_window(w)? {
            report.not_invariant += 1;
            continue;
        }
        let perm = FinitePerm::from_spec(g, w)?;
        let Some(root) = perm.nth_root(bounds.n) else {
            report.no_root += 1;
            continue;
        };
        let displacement = root.images().iter().enumerate().map(|(i, &y)| i.abs_diff(y) as u64).max().unwrap_or(0);
        if displacement <= bounds.displacement_budget {
            report.status = SearchStatus::Found;
            report.found = Some(FoundRoot { window: size, displacement, root: root.to_spec() });
            break;
        }
        report.over_budget += 1;
    }
    report.statement = match &report.found {
        Some(f) => format!(
            "FOUND: on [1, {}] an element h with h^{} = {} and displacement {} ≤ {}",
            f.window, bounds.n, target, f.displacement, bounds.displacement_budget
        ),
        None => format!(
            "NOT-FOUND: demonstration only. Searched windows [1, N] for N = {}..={} ({} windows) for h with h^{} = {} \
             permuting the window and displacement ≤ {}: {} windows not invariant under {}, {} with no {} root \
             in Sym(N), {} with a root whose constructed representative exceeds the budget. Nothing is claimed about \
             roots that preserve no searched window.",
            bounds.min_window,
            bounds.max_window,
            report.windows_searched,
            bounds.n,
            target,
            bounds.displacement_budget,
            report.not_invariant,
            target,
            report.no_root,
            ordinal(bounds.n),
            report.over_budget
        ),
    };
    Ok(report)
}
