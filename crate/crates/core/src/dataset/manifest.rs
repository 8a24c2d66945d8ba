use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::DatasetError;

/// Number of gesture types in the built-in taxonomy.
pub const GESTURE_COUNT: usize = 22;

/// Gestures whose single performance consists of three periods.
const PERIODIC: [usize; 12] = [2, 3, 7, 8, 10, 12, 13, 14, 15, 17, 18, 19];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GestureClass {
    Symbolic,
    Deictic,
    Iconic,
    Manipulative,
}

/// Significant motion components: hand translation (T), hand rotation (R)
/// and individual finger movement (F).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct MotionComponents {
    pub translation: bool,
    pub rotation: bool,
    pub fingers: bool,
}

impl fmt::Display for MotionComponents {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.translation {
            f.write_str("T")?;
        }
        if self.rotation {
            f.write_str("R")?;
        }
        if self.fingers {
            f.write_str("F")?;
        }
        Ok(())
    }
}

impl FromStr for MotionComponents {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut m = MotionComponents::default();
        for c in s.chars() {
            let flag = match c {
                'T' => &mut m.translation,
                'R' => &mut m.rotation,
                'F' => &mut m.fingers,
                other => return Err(format!("unknown motion component '{other}'")),
            };
            if *flag {
                return Err(format!("motion component '{c}' repeated"));
            }
            *flag = true;
        }
        if m == MotionComponents::default() {
            return Err("empty motion component set".into());
        }
        Ok(m)
    }
}

impl Serialize for MotionComponents {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for MotionComponents {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GestureEntry {
    pub index: usize,
    pub name: String,
    pub class: GestureClass,
    pub motion: MotionComponents,
    pub periodic: bool,
    pub comment: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GestureManifest {
    pub entries: Vec<GestureEntry>,
}

impl GestureManifest {
    /// Checks the taxonomy invariants: 22 entries indexed 1..=22 in order,
    /// unique names, and the fixed set of periodic gestures.
    pub fn validate(&self) -> Result<(), DatasetError> {
        if self.entries.len() != GESTURE_COUNT {
            return Err(DatasetError::InvalidManifest(format!(
                "expected {GESTURE_COUNT} gestures, found {}",
                self.entries.len()
            )));
        }
        let mut names = HashSet::new();
        for (i, e) in self.entries.iter().enumerate() {
            if e.index != i + 1 {
                return Err(DatasetError::InvalidManifest(format!(
                    "entry {} carries index {}",
                    i + 1,
                    e.index
                )));
            }
            if !names.insert(e.name.as_str()) {
                return Err(DatasetError::InvalidManifest(format!("duplicate name {:?}", e.name)));
            }
            if e.periodic != PERIODIC.contains(&e.index) {
                return Err(DatasetError::InvalidManifest(format!(
                    "gesture {} has wrong periodic flag",
                    e.index
                )));
            }
        }
        Ok(())
    }

    /// Looks up a gesture by its 1-based index.
    pub fn get(&self, index: usize) -> Option<&GestureEntry> {
        self.entries.iter().find(|e| e.index == index)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// The 22-gesture taxonomy used for every recording session.
pub fn builtin_manifest() -> GestureManifest {
    use GestureClass::*;
    let rows: [(&str, GestureClass, &str, &str); GESTURE_COUNT] = [
        ("A-OK", Symbolic, "F", "common 'okay' gesture"),
        ("Walking", Iconic, "TF", "fingers depict a walking person"),
        ("Cutting", Iconic, "F", "fingers portrait cutting a sheet of paper"),
        ("Shove away", Iconic, "T", "hand shoves away imaginary object"),
        ("Point at self", Deictic, "RF", "finger points at the user"),
        ("Thumbs up", Symbolic, "RF", "classic 'thumbs up' gesture"),
        ("Crazy", Symbolic, "TRF", "symbolizes 'a crazy person'"),
        ("Knocking", Iconic, "RF", "finger in knocking motion"),
        ("Cutthroat", Symbolic, "TR", "common taunting gesture"),
        ("Money", Symbolic, "F", "popular 'money' sign"),
        ("Thumbs down", Symbolic, "RF", "classic 'thumbs down' gesture"),
        ("Doubting", Symbolic, "F", "popular (Polish?) flippant 'I doubt'"),
        ("Continue", Iconic, "R", "circular hand motion 'continue', 'go on'"),
        ("Speaking", Iconic, "F", "hand portraits a speaking mouth"),
        ("Hello", Symbolic, "R", "greeting gesture, waving hand motion"),
        ("Grasping", Manipulative, "TF", "grasping an object"),
        ("Scaling", Manipulative, "F", "finger movement depicts size change"),
        ("Rotating", Manipulative, "R", "hand rotation depicts object rotation"),
        ("Come here", Symbolic, "F", "fingers waving; 'come here'"),
        ("Telephone", Symbolic, "TRF", "popular 'phone' depiction"),
        ("Go away", Symbolic, "F", "fingers waving; 'go away'"),
        ("Relocate", Deictic, "TF", "'put that there'"),
    ];
    let entries = rows
        .iter()
        .enumerate()
        .map(|(i, &(name, class, motion, comment))| GestureEntry {
            index: i + 1,
            name: name.to_string(),
            class,
            motion: motion.parse().expect("static motion code"),
            periodic: PERIODIC.contains(&(i + 1)),
            comment: comment.to_string(),
        })
        .collect();
    GestureManifest { entries }
}
