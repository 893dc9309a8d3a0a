//! Named orders shipped with the library.

use std::collections::HashMap;
use std::sync::OnceLock;

use crate::lattice::{parse_order_file, LatticeError, Order};

#[derive(Debug, Clone, Copy)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub source: &'static str,
    pub class_number_1: bool,
    pub maximal: bool,
    pub superorder: Option<&'static str>,
    pub expected_units: Option<usize>,
}

macro_rules! entry {
    ($name:literal, $cn1:expr, $max:expr, $sup:expr, $units:expr) => {
        CatalogEntry {
            name: $name,
            source: include_str!(concat!("../catalog/", $name, ".order")),
            class_number_1: $cn1,
            maximal: $max,
            superorder: $sup,
            expected_units: $units,
        }
    };
}

pub const CATALOG: &[CatalogEntry] = &[
    entry!("lipschitz", false, false, Some("hurwitz"), Some(8)),
    entry!("hurwitz", true, true, None, Some(24)),
    entry!("m_p3", false, false, Some("hurwitz"), Some(4)),
    entry!("g_p3", false, false, Some("hurwitz"), Some(2)),
    entry!("g_pq", false, false, Some("hurwitz"), Some(2)),
    entry!("g_q11", false, false, Some("hurwitz"), Some(2)),
    entry!("m31", true, true, None, Some(12)),
    entry!("g31", false, false, Some("m31"), Some(4)),
    entry!("f31", false, false, Some("m31"), Some(2)),
    entry!("cubian", true, true, None, Some(48)),
    entry!("g_q3", false, false, Some("cubian"), Some(4)),
    entry!("g_q4", false, false, Some("cubian"), Some(2)),
    entry!("icosian", true, true, None, Some(120)),
    entry!("hurwitz5", false, false, Some("icosian"), Some(24)),
    entry!("gotzky_g", false, false, Some("icosian"), Some(8)),
];

pub fn entry(name: &str) -> Option<&'static CatalogEntry> {
    CATALOG.iter().find(|e| e.name == name)
}

/// The parsed catalog order called `name`.
pub fn order(name: &str) -> Result<Order, LatticeError> {
    static CACHE: OnceLock<HashMap<&'static str, Order>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| {
        CATALOG.iter().map(|e| (e.name, parse_order_file(e.source).expect("catalog file parses"))).collect()
    });
    cache.get(name).cloned().ok_or_else(|| LatticeError::Parse {
        line: 0,
        col: 0,
        msg: format!("unknown catalog order '{name}'"),
    })
}

/// Name of the catalog entry equal to `o`, if any.
pub fn name_of(o: &Order) -> Option<&'static str> {
    CATALOG.iter().map(|e| e.name).find(|n| order(n).is_ok_and(|c| c == *o))
}
