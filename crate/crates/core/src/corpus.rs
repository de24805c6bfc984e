//! Specification texts shipped with the crate.

pub const CONDITIONAL_EXAMPLE: &str = include_str!("../specs/conditional_example.rml");
pub const COUNTING: &str = include_str!("../specs/counting.rml");
pub const NUMERICAL: &str = include_str!("../specs/numerical.rml");
/// The conditional task exactly as published; see [`CONDITIONAL_TASK`].
pub const CONDITIONAL_TASK_FIGURE: &str = include_str!("../specs/conditional_task_figure.rml");
/// The conditional task with the comparison oriented to match its task strings.
pub const CONDITIONAL_TASK: &str = include_str!("../specs/conditional_task.rml");
pub const LETTER_STANDARD: &str = include_str!("../specs/letter_standard.rml");

pub const ALL: &[(&str, &str)] = &[
    ("conditional_example", CONDITIONAL_EXAMPLE),
    ("counting", COUNTING),
    ("numerical", NUMERICAL),
    ("conditional_task_figure", CONDITIONAL_TASK_FIGURE),
    ("conditional_task", CONDITIONAL_TASK),
    ("letter_standard", LETTER_STANDARD),
];

pub fn by_name(name: &str) -> Option<&'static str> {
    ALL.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

/// The conditional task with threshold `m`: C follows when A was seen fewer
/// than `m` times, D otherwise.
pub fn conditional_task(m: u32) -> String {
    CONDITIONAL_TASK.replace("n < 2.5", &format!("n < {}", m as f64 - 0.5))
}
