//! Builtin example games with their expected equilibria.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::game::{CpGame, GameSpec, SituationId, SituationSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown builtin `{name}`; available: {}", .available.join(", "))]
pub struct UnknownBuiltin {
    pub name: String,
    pub available: Vec<&'static str>,
}

#[derive(Clone, Debug)]
pub struct BuiltinEntry {
    pub name: &'static str,
    pub game: CpGame,
    pub expected_equilibria: BTreeSet<SituationSet>,
    pub provenance_note: &'static str,
}

type Pairs = Vec<(String, String)>;

const NAMES: [&str; 11] = [
    "blink_defeatism",
    "blink_foresight",
    "blink_hindsight",
    "blink_omnisight",
    "lambda_phage",
    "matching_pennies",
    "prisoners_dilemma",
    "scissors_paper_stone",
    "square_v1",
    "square_v2",
    "square_v3",
];

pub fn list_builtins() -> Vec<&'static str> {
    NAMES.to_vec()
}

pub fn builtin(name: &str) -> Result<BuiltinEntry, UnknownBuiltin> {
    let (name, spec, expected, note): (&'static str, GameSpec, Vec<Vec<&str>>, &'static str) =
        match name {
            "square_v1" => (
                "square_v1",
                square_v1(),
                vec![vec!["1|3"], vec!["4|2"], vec!["3|1"], vec!["2|4"]],
                "token game on a square, moves along edges; players prefer opposite corners",
            ),
            "square_v2" => (
                "square_v2",
                square_clockwise(false),
                vec![SQUARE.to_vec()],
                "clockwise-only square game; one perpetual chase, no fixed position",
            ),
            "square_v3" => (
                "square_v3",
                square_clockwise(true),
                vec![SQUARE.to_vec()],
                "clockwise square game starting from 1|ω; the chase is entered after one step",
            ),
            "prisoners_dilemma" => (
                "prisoners_dilemma",
                prisoners_dilemma(),
                vec![vec!["F,F"]],
                "prisoner's dilemma with quiet (Q) and fink (F); mutual finking is the sole stable outcome",
            ),
            "matching_pennies" => (
                "matching_pennies",
                matching_pennies(),
                vec![vec!["H,H", "H,T", "T,H", "T,T"]],
                "matching pennies; the change-of-mind cycle is the equilibrium",
            ),
            "scissors_paper_stone" => (
                "scissors_paper_stone",
                scissors_paper_stone(),
                vec![vec![
                    "C,C", "C,P", "C,T", "P,C", "P,P", "P,T", "T,C", "T,P", "T,T",
                ]],
                "scissors (C), paper (P), stone (T); preferences given without transitive \
                 arrows and closed on load; perpetual moves",
            ),
            "blink_foresight" => (
                "blink_foresight",
                blink(&[("C", "L")], &[("C", "R")], LEFT_WINS, RIGHT_WINS),
                vec![vec!["L"], vec!["R"]],
                "blink and you lose, foresight: each player grabs the other token",
            ),
            "blink_hindsight" => (
                "blink_hindsight",
                blink(&[("R", "C")], &[("L", "C")], LEFT_WINS, RIGHT_WINS),
                vec![vec!["C"]],
                "blink and you lose, hindsight: aversion flees the losing position",
            ),
            "blink_omnisight" => (
                "blink_omnisight",
                blink(
                    &[("C", "L"), ("R", "C")],
                    &[("C", "R"), ("L", "C")],
                    LEFT_WINS,
                    RIGHT_WINS,
                ),
                vec![vec!["L", "C", "R"]],
                "blink and you lose, omnisight: foresight and hindsight together",
            ),
            "blink_defeatism" => (
                "blink_defeatism",
                // Left hands the token back, so she ranks outcomes like Right.
                blink(&[("L", "C")], &[("C", "R")], RIGHT_WINS, RIGHT_WINS),
                vec![vec!["R"]],
                "blink and you lose, defeatism: Left returns the token when she has it",
            ),
            "lambda_phage" => (
                "lambda_phage",
                lambda_phage(),
                vec![vec!["⟨cI0,cro1⟩"], vec!["⟨cI2,cro0⟩", "⟨cI1,cro0⟩"]],
                "λ phage gene switch with players cI, cro and Env; lyse ⟨cI0,cro1⟩ and \
                 lysogen {⟨cI2,cro0⟩, ⟨cI1,cro0⟩}",
            ),
            _ => {
                return Err(UnknownBuiltin {
                    name: name.to_owned(),
                    available: list_builtins(),
                })
            }
        };
    let game = CpGame::build(&spec).expect("builtin games are well formed");
    let game = if name == "scissors_paper_stone" {
        game.with_transitive_preferences()
    } else {
        game
    };
    let expected_equilibria = expected
        .into_iter()
        .map(|set| set.into_iter().map(SituationId::from).collect())
        .collect();
    Ok(BuiltinEntry {
        name,
        game,
        expected_equilibria,
        provenance_note: note,
    })
}

fn pairs(v: &[(&str, &str)]) -> Pairs {
    v.iter()
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .collect()
}

fn spec(
    agents: &[&str],
    situations: &[String],
    conversion: Vec<Pairs>,
    preference: Vec<Pairs>,
) -> GameSpec {
    GameSpec {
        agents: agents.iter().map(|a| a.to_string()).collect(),
        situations: situations.to_vec(),
        conversion: agents
            .iter()
            .map(|a| a.to_string())
            .zip(conversion)
            .collect(),
        preference: agents
            .iter()
            .map(|a| a.to_string())
            .zip(preference)
            .collect(),
    }
}

/// Square situations `alice|beth`, in the order used for listing.
const SQUARE: [&str; 12] = [
    "1|2", "1|3", "1|4", "2|3", "2|4", "2|1", "3|4", "3|1", "3|2", "4|1", "4|2", "4|3",
];

fn sq(alice: u8, beth: u8) -> String {
    format!("{alice}|{beth}")
}

fn square_positions() -> impl Iterator<Item = (u8, u8)> {
    (1..=4u8).flat_map(|i| (1..=4u8).filter(move |&j| j != i).map(move |j| (i, j)))
}

fn clockwise(v: u8) -> u8 {
    v % 4 + 1
}

fn counter_clockwise(v: u8) -> u8 {
    (v + 2) % 4 + 1
}

fn square_v1() -> GameSpec {
    let mut alice = Pairs::new();
    let mut beth = Pairs::new();
    for (i, j) in square_positions() {
        for k in [clockwise(i), counter_clockwise(i)] {
            if k != j {
                alice.push((sq(i, j), sq(k, j)));
            }
        }
        for k in [clockwise(j), counter_clockwise(j)] {
            if k != i {
                beth.push((sq(i, j), sq(i, k)));
            }
        }
    }
    // Adjacent tokens (odd difference) are worse than opposite ones.
    let mut pref = Pairs::new();
    for (i, j) in square_positions().filter(|(i, j)| (i + j) % 2 == 1) {
        for (k, l) in square_positions().filter(|(k, l)| (k + l) % 2 == 0) {
            pref.push((sq(i, j), sq(k, l)));
        }
    }
    let situations: Vec<String> = SQUARE.iter().map(|s| s.to_string()).collect();
    spec(
        &["Alice", "Beth"],
        &situations,
        vec![alice, beth],
        vec![pref.clone(), pref],
    )
}

/// Clockwise steps from `from` to `to` on the square.
fn cw_distance(from: u8, to: u8) -> u8 {
    (to + 4 - from) % 4
}

fn square_clockwise(with_start: bool) -> GameSpec {
    let mut alice = Pairs::new();
    let mut beth = Pairs::new();
    for (i, j) in square_positions() {
        if clockwise(i) != j {
            alice.push((sq(i, j), sq(clockwise(i), j)));
        }
        if clockwise(j) != i {
            beth.push((sq(i, j), sq(i, clockwise(j))));
        }
    }
    // Each player wants the opponent as far behind as possible, clockwise.
    let mut pref_alice = Pairs::new();
    let mut pref_beth = Pairs::new();
    for (i, j) in square_positions() {
        for (k, l) in square_positions() {
            if cw_distance(l, k) > cw_distance(j, i) {
                pref_alice.push((sq(i, j), sq(k, l)));
            }
            if cw_distance(k, l) > cw_distance(i, j) {
                pref_beth.push((sq(i, j), sq(k, l)));
            }
        }
    }
    let mut situations: Vec<String> = SQUARE.iter().map(|s| s.to_string()).collect();
    if with_start {
        let start = "1|ω".to_string();
        for j in 2..=4 {
            beth.push((start.clone(), sq(1, j)));
        }
        // Beth loses by not playing: any placed position beats the start.
        for s in &situations {
            pref_beth.push((start.clone(), s.clone()));
        }
        situations.insert(0, start);
    }
    spec(
        &["Alice", "Beth"],
        &situations,
        vec![alice, beth],
        vec![pref_alice, pref_beth],
    )
}

/// Two-player strategic conversion: each player changes its own coordinate,
/// staying put included.
fn product_conversion(strategies: &[&str]) -> (Vec<String>, Pairs, Pairs) {
    let name = |a: &str, b: &str| format!("{a},{b}");
    let mut situations = Vec::new();
    let mut first = Pairs::new();
    let mut second = Pairs::new();
    for a in strategies {
        for b in strategies {
            situations.push(name(a, b));
            for x in strategies {
                first.push((name(a, b), name(x, b)));
                second.push((name(a, b), name(a, x)));
            }
        }
    }
    (situations, first, second)
}

fn prisoners_dilemma() -> GameSpec {
    let (situations, conv_a, conv_b) = product_conversion(&["Q", "F"]);
    let pref_a = pairs(&[
        ("Q,F", "Q,Q"),
        ("Q,F", "F,Q"),
        ("Q,F", "F,F"),
        ("F,F", "Q,Q"),
        ("F,F", "F,Q"),
        ("Q,Q", "F,Q"),
    ]);
    let pref_b = pairs(&[
        ("F,Q", "Q,Q"),
        ("F,Q", "Q,F"),
        ("F,Q", "F,F"),
        ("F,F", "Q,Q"),
        ("F,F", "Q,F"),
        ("Q,Q", "Q,F"),
    ]);
    spec(
        &["A", "B"],
        &situations,
        vec![conv_a, conv_b],
        vec![pref_a, pref_b],
    )
}

fn matching_pennies() -> GameSpec {
    let (situations, conv_a, conv_b) = product_conversion(&["H", "T"]);
    let pref_a = pairs(&[
        ("T,H", "H,H"),
        ("H,T", "T,T"),
        ("H,T", "H,H"),
        ("T,H", "T,T"),
    ]);
    let pref_b = pairs(&[
        ("H,H", "H,T"),
        ("T,T", "T,H"),
        ("H,H", "T,H"),
        ("T,T", "H,T"),
    ]);
    spec(
        &["A", "B"],
        &situations,
        vec![conv_a, conv_b],
        vec![pref_a, pref_b],
    )
}

fn scissors_paper_stone() -> GameSpec {
    let (situations, conv_alice, conv_beth) = product_conversion(&["C", "P", "T"]);
    let pref_alice = pairs(&[
        ("C,T", "C,C"),
        ("C,C", "C,P"),
        ("P,C", "P,P"),
        ("P,P", "P,T"),
        ("T,T", "T,C"),
        ("T,P", "T,T"),
        ("C,C", "T,C"),
        ("P,C", "C,C"),
        ("P,P", "C,P"),
        ("T,P", "P,P"),
        ("C,T", "T,T"),
        ("T,T", "P,T"),
    ]);
    let pref_beth = pairs(&[
        ("C,C", "C,T"),
        ("C,P", "C,C"),
        ("P,P", "P,C"),
        ("P,T", "P,P"),
        ("T,C", "T,T"),
        ("T,T", "T,P"),
        ("T,C", "C,C"),
        ("C,C", "P,C"),
        ("C,P", "P,P"),
        ("P,P", "T,P"),
        ("T,T", "C,T"),
        ("P,T", "T,T"),
    ]);
    spec(
        &["Alice", "Beth"],
        &situations,
        vec![conv_alice, conv_beth],
        vec![pref_alice, pref_beth],
    )
}

/// R ⊳ C ⊳ L, transitively closed: the ranking of a player who wants L.
const LEFT_WINS: &[(&str, &str)] = &[("R", "C"), ("C", "L"), ("R", "L")];
/// L ⊳ C ⊳ R, transitively closed.
const RIGHT_WINS: &[(&str, &str)] = &[("L", "C"), ("C", "R"), ("L", "R")];

fn blink(
    left: &[(&str, &str)],
    right: &[(&str, &str)],
    left_pref: &[(&str, &str)],
    right_pref: &[(&str, &str)],
) -> GameSpec {
    let situations: Vec<String> = ["L", "C", "R"].iter().map(|s| s.to_string()).collect();
    spec(
        &["Left", "Right"],
        &situations,
        vec![pairs(left), pairs(right)],
        vec![pairs(left_pref), pairs(right_pref)],
    )
}

fn phage(ci: u8, cro: u8) -> String {
    format!("⟨cI{ci},cro{cro}⟩")
}

fn lambda_phage() -> GameSpec {
    let mut situations = Vec::new();
    for ci in (0..=2).rev() {
        for cro in 0..=1 {
            situations.push(phage(ci, cro));
        }
    }
    // One level at a time on one gene; shared by all three players.
    let mut conv = Pairs::new();
    for ci in 0..=2u8 {
        for cro in 0..=1u8 {
            if ci < 2 {
                conv.push((phage(ci, cro), phage(ci + 1, cro)));
                conv.push((phage(ci + 1, cro), phage(ci, cro)));
            }
            if cro < 1 {
                conv.push((phage(ci, cro), phage(ci, cro + 1)));
                conv.push((phage(ci, cro + 1), phage(ci, cro)));
            }
        }
    }
    let ci_pref = vec![
        (phage(2, 0), phage(1, 0)),
        (phage(1, 0), phage(2, 0)),
        (phage(2, 1), phage(1, 1)),
        (phage(1, 1), phage(2, 1)),
        (phage(2, 1), phage(2, 0)),
        (phage(1, 1), phage(1, 0)),
    ];
    let cro_pref = vec![(phage(1, 1), phage(0, 1))];
    let env_pref = vec![(phage(0, 0), phage(1, 0)), (phage(0, 0), phage(0, 1))];
    spec(
        &["cI", "cro", "Env"],
        &situations,
        vec![conv.clone(), conv.clone(), conv],
        vec![ci_pref, cro_pref, env_pref],
    )
}
