//! Seeded synthetic data shaped like a country-level diet/health table.
//!
//! Two responses share a latent linear signal with opposite signs plus a
//! common disturbance, so they are strongly negatively correlated whatever
//! the signal-to-noise ratio. Five predictors carry signal; `water_access`
//! is drawn independently of everything else. Three food columns form an
//! untagged group.

use crate::dataprep::RawTable;
use crate::error::Result;
use crate::rng::SplitMix64;

pub const DEMO_ROWS: usize = 86;
pub const DEMO_SEED: u64 = 22;

pub const RESPONSES: [&str; 2] = ["yll_communicable", "yll_noncommunicable"];
pub const PREDICTORS: [&str; 6] = [
    "fertility",
    "log_gdp",
    "urban_share",
    "schooling",
    "health_spend",
    "water_access",
];
pub const NOISE_PREDICTOR: &str = "water_access";
pub const FOODS: [&str; 3] = ["cereal_kcal", "meat_kcal", "sugar_kcal"];

/// Subset config matching [`demo_table`].
pub fn demo_subsets() -> String {
    let mut s = String::from("# demo variable groups\nrole = response\n");
    for r in RESPONSES {
        s.push_str(&format!("health.column = {r}\n"));
    }
    s.push_str("role = predictor\n");
    for p in PREDICTORS {
        s.push_str(&format!("demographic.column = {p}\n"));
    }
    s.push_str("role = none\n");
    for f in FOODS {
        s.push_str(&format!("food.column = {f}\n"));
    }
    s
}

/// Column order: `country`, responses, predictors, foods.
pub fn demo_table(n: usize, seed: u64) -> Result<RawTable> {
    let mut rng = SplitMix64::new(seed);
    let mut names = vec!["country".to_string()];
    names.extend(RESPONSES.iter().map(|s| s.to_string()));
    names.extend(PREDICTORS.iter().map(|s| s.to_string()));
    names.extend(FOODS.iter().map(|s| s.to_string()));

    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        // development factor drives most of the predictors
        let dev = rng.normal();
        let fertility = 3.0 - 1.1 * dev + 0.6 * rng.normal();
        let log_gdp = 8.5 + 1.2 * dev + 0.5 * rng.normal();
        let urban = 55.0 + 15.0 * dev + 10.0 * rng.normal();
        let schooling = 8.0 + 2.5 * dev + 1.8 * rng.normal();
        let health = 6.0 + 1.5 * rng.normal();
        let water = 80.0 + 12.0 * rng.normal();

        let z = 0.9 * (fertility - 3.0) / 1.25 - 0.5 * (log_gdp - 8.5) / 1.3
            - 0.3 * (urban - 55.0) / 18.0
            - 0.35 * (schooling - 8.0) / 3.0
            - 0.4 * (health - 6.0) / 1.5;
        let shared = 1.0 * rng.normal();
        let y1 = 30.0 + 12.0 * (z + shared + 0.08 * rng.normal());
        let y2 = 45.0 - 9.0 * (z + shared + 0.08 * rng.normal());

        let cereal = 1300.0 - 150.0 * dev + 120.0 * rng.normal();
        let meat = 250.0 + 90.0 * dev + 60.0 * rng.normal();
        let sugar = 280.0 + 60.0 * dev + 50.0 * rng.normal();

        rows.push(
            [
                (i + 1) as f64,
                y1,
                y2,
                fertility,
                log_gdp,
                urban,
                schooling,
                health,
                water,
                cereal,
                meat,
                sugar,
            ]
            .iter()
            .map(|&v| Some(v))
            .collect(),
        );
    }
    RawTable::new(names, rows)
}

/// Comma-separated rendering with shortest round-trip numbers.
pub fn to_csv(table: &RawTable) -> String {
    let mut out = table.names().join(",");
    out.push('\n');
    for row in table.rows() {
        let cells: Vec<String> = row
            .iter()
            .map(|c| c.map_or_else(|| "NA".to_string(), |v| format!("{v}")))
            .collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}
