/// Scenario files compiled into the binary, keyed by name.
const BUNDLED: &[(&str, &str)] = &[
    (
        "building6d_large",
        include_str!("../../scenarios/building6d_large.json"),
    ),
    (
        "building6d_small",
        include_str!("../../scenarios/building6d_small.json"),
    ),
    (
        "dubins_narrow_large",
        include_str!("../../scenarios/dubins_narrow_large.json"),
    ),
    (
        "dubins_narrow_small",
        include_str!("../../scenarios/dubins_narrow_small.json"),
    ),
    (
        "forest6d_large",
        include_str!("../../scenarios/forest6d_large.json"),
    ),
    (
        "forest6d_small",
        include_str!("../../scenarios/forest6d_small.json"),
    ),
    (
        "free2d_large",
        include_str!("../../scenarios/free2d_large.json"),
    ),
    (
        "free2d_small",
        include_str!("../../scenarios/free2d_small.json"),
    ),
    (
        "narrow6d_large",
        include_str!("../../scenarios/narrow6d_large.json"),
    ),
    (
        "narrow6d_small",
        include_str!("../../scenarios/narrow6d_small.json"),
    ),
    (
        "quad12d_forest_large",
        include_str!("../../scenarios/quad12d_forest_large.json"),
    ),
    (
        "quad12d_forest_small",
        include_str!("../../scenarios/quad12d_forest_small.json"),
    ),
    (
        "zigzag2d_large",
        include_str!("../../scenarios/zigzag2d_large.json"),
    ),
    (
        "zigzag2d_small",
        include_str!("../../scenarios/zigzag2d_small.json"),
    ),
    (
        "zigzag6d_large",
        include_str!("../../scenarios/zigzag6d_large.json"),
    ),
    (
        "zigzag6d_small",
        include_str!("../../scenarios/zigzag6d_small.json"),
    ),
];

/// Returns the bundled scenario JSON for `name`. A bare family name such as
/// `forest6d` resolves to its `_large` variant.
pub fn lookup(name: &str) -> Option<&'static str> {
    let find = |n: &str| BUNDLED.iter().find(|(k, _)| *k == n).map(|(_, v)| *v);
    find(name).or_else(|| find(&format!("{name}_large")))
}

pub fn bundled_names() -> Vec<&'static str> {
    BUNDLED.iter().map(|(k, _)| *k).collect()
}
