use pinwheel_web::{classify_value, regions_value, schedule_value, verify_value};

#[test]
fn regions_list_j_then_m1_to_m7() {
    let v = regions_value();
    let names: Vec<&str> = v
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["name"].as_str().unwrap())
        .collect();
    assert_eq!(names, ["J", "M1", "M2", "M3", "M4", "M5", "M6", "M7"]);
    assert_eq!(v[0]["vertices"].as_array().unwrap().len(), 3);
}

#[test]
fn classify_point_in_m6() {
    // (1/a1, 1/a2) for (12/5, 5/2)
    let v = classify_value("5/12", "2/5").unwrap();
    assert_eq!(v["case"], "VI");
    assert_eq!(v["periods"][2], "60");
    assert_eq!(v["schedule"], "121211212123");
    assert!(classify_value("1/2", "1/2").is_err());
    assert!(classify_value("3/2", "1/4").is_err());
}

#[test]
fn schedule_then_verify() {
    let v = schedule_value("24,2,7,24").unwrap();
    let s = v["schedule"].as_str().unwrap();
    assert_eq!(verify_value(s, "24,2,7,24").unwrap()["valid"], true);
    assert!(schedule_value("2,3,5").is_err());
}

#[test]
fn verify_reports_counterexample() {
    let v = verify_value("1111212", "2,7/2").unwrap();
    assert_eq!(v["valid"], false);
    assert_eq!(v["counterexample"]["task"], 2);
    assert_eq!(v["counterexample"]["window_length"], 4);
    assert!(verify_value("1x", "2").is_err());
}
