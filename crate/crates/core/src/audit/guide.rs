use serde::Serialize;

use crate::workbook::Workbook;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GuideCheck {
    pub builder: bool,
    pub date: bool,
    pub purpose: bool,
}

impl GuideCheck {
    pub fn all(&self) -> bool {
        self.builder && self.date && self.purpose
    }
}

/// Presence of each user-guide field. The date must be a valid
/// `YYYY-MM-DD` calendar date.
pub fn check_user_guide(workbook: &Workbook) -> GuideCheck {
    match &workbook.user_guide {
        None => GuideCheck {
            builder: false,
            date: false,
            purpose: false,
        },
        Some(g) => GuideCheck {
            builder: !g.builder.trim().is_empty(),
            date: g.date_created().is_some(),
            purpose: !g.purpose.trim().is_empty(),
        },
    }
}

/// At least one named region, and no two regions overlap.
pub fn check_modularisation(workbook: &Workbook) -> bool {
    let regions: Vec<_> = workbook.regions().values().collect();
    !regions.is_empty()
        && regions
            .iter()
            .enumerate()
            .all(|(i, a)| regions[i + 1..].iter().all(|b| !a.overlaps(b)))
}
