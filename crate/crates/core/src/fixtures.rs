//! Bundled teaching models.
//!
//! `nightclub` is a six-month income/outgoings loan model; its seeded
//! variant carries a single copy error in the accumulating-profit row.
//! `sales` combines a currency-conversion sheet and a salesperson
//! commission sheet, and ships with a seven-mark peer audit script.
//!
//! The night-club source material shows the June electricity charge as a
//! text-styled `£0`; the fixture stores it as the number 0.

use crate::audit::AuditScript;
use crate::seeding::SeedManifest;
use crate::workbook::{load_workbook, Workbook};

pub const NIGHTCLUB_REF: &str = include_str!("../../../fixtures/nightclub_ref.grid");
pub const NIGHTCLUB_SEEDED: &str = include_str!("../../../fixtures/nightclub_seeded.grid");
pub const NIGHTCLUB_MANIFEST: &str = include_str!("../../../fixtures/nightclub.manifest.json");
pub const NIGHTCLUB_SCRIPT: &str = include_str!("../../../fixtures/nightclub.script.json");
pub const SALES_REF: &str = include_str!("../../../fixtures/sales_ref.grid");
pub const SALES_SCRIPT: &str = include_str!("../../../fixtures/sales.script.json");

pub fn nightclub() -> Workbook {
    load_workbook(NIGHTCLUB_REF).expect("bundled fixture loads")
}

pub fn nightclub_seeded() -> Workbook {
    load_workbook(NIGHTCLUB_SEEDED).expect("bundled fixture loads")
}

pub fn nightclub_manifest() -> SeedManifest {
    SeedManifest::from_json(NIGHTCLUB_MANIFEST).expect("bundled manifest parses")
}

pub fn nightclub_script() -> AuditScript {
    AuditScript::from_json(NIGHTCLUB_SCRIPT).expect("bundled script parses")
}

pub fn sales() -> Workbook {
    load_workbook(SALES_REF).expect("bundled fixture loads")
}

pub fn sales_script() -> AuditScript {
    AuditScript::from_json(SALES_SCRIPT).expect("bundled script parses")
}
