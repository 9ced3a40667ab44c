//! Bundled instance files, compiled into the library.

use crate::instance::InstanceFile;

const FIXTURES: &[(&str, &str)] = &[
    ("kope-1982", include_str!("../fixtures/kope-1982.json")),
    ("modular-3x4", include_str!("../fixtures/modular-3x4.json")),
    (
        "windows-single",
        include_str!("../fixtures/windows-single.json"),
    ),
    (
        "windows-three",
        include_str!("../fixtures/windows-three.json"),
    ),
];

pub fn names() -> impl Iterator<Item = &'static str> {
    FIXTURES.iter().map(|(n, _)| *n)
}

/// Raw JSON text of a bundled fixture.
pub fn text(name: &str) -> Option<&'static str> {
    FIXTURES.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

pub fn load(name: &str) -> Option<InstanceFile> {
    text(name).map(|t| InstanceFile::from_json(t).expect("bundled fixture parses"))
}

pub fn kope_1982() -> InstanceFile {
    load("kope-1982").expect("bundled")
}

pub fn modular_3x4() -> InstanceFile {
    load("modular-3x4").expect("bundled")
}

pub fn windows_single() -> InstanceFile {
    load("windows-single").expect("bundled")
}

pub fn windows_three() -> InstanceFile {
    load("windows-three").expect("bundled")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_fixture_parses_validates_and_round_trips() {
        for name in names() {
            let f = load(name).unwrap();
            assert_eq!(f.name, name);
            f.validate().unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(InstanceFile::from_json(&f.to_json()).unwrap(), f);
        }
        assert!(load("nope").is_none());
    }
}
