//! Load, edit and save an instance file; errors point at the bad field.
use jitbal::fixtures;
use jitbal::instance::{load_instance, save_instance, InstanceFile};

fn main() {
    let dir = scratch_dir();
    let path = dir.join("kope.json");
    let mut f = fixtures::kope_1982();
    f.homebuilding.as_mut().unwrap().capacity[0] = 1600.0;
    save_instance(&f, &path).unwrap();
    let back = load_instance(&path).unwrap();
    println!("round trip equal: {}", back == f);

    let mut v: serde_json::Value = serde_json::from_str(&f.to_json()).unwrap();
    v["homebuilding"]["catalog"]["buildings"][2]["assembly_duration"] = "long".into();
    println!("{}", InstanceFile::from_json(&v.to_string()).unwrap_err());

    v["homebuilding"]["catalog"]["buildings"][2]["assembly_duration"] = (-1.0).into();
    let f = InstanceFile::from_json(&v.to_string()).unwrap();
    println!("{}", f.validate().unwrap_err());
}

fn scratch_dir() -> std::path::PathBuf {
    let d = std::env::temp_dir().join("jitbal-example");
    std::fs::create_dir_all(&d).unwrap();
    d
}
