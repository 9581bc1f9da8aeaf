//! Embedded wordlist for the dictionary-style domain generator.
//!
//! 300 lowercase English words, 3 to 10 characters, unique.

pub const WORDS: &[&str] = &[
    "able", "acid", "actor", "adopt", "after", "agent", "agree", "ahead", "alarm", "album",
    "alert", "alley", "allow", "alpha", "amber", "anchor", "angle", "animal", "answer", "apple",
    "apply", "april", "arena", "argue", "arise", "armor", "arrow", "asset", "atlas", "attic",
    "audio", "august", "autumn", "avenue", "award", "azure", "bacon", "badge", "baker", "bamboo",
    "banner", "barrel", "basic", "basket", "battle", "beach", "beacon", "beard", "beast", "began",
    "begin", "being", "bell", "belt", "bench", "berry", "birch", "bird", "blade", "blank", "blaze",
    "blend", "block", "bloom", "board", "bonus", "book", "booth", "border", "bottle", "bound",
    "brain", "branch", "brave", "bread", "break", "breeze", "brick", "bridge", "brief", "bright",
    "broad", "bronze", "brook", "brush", "budget", "buffalo", "build", "bundle", "burst", "butter",
    "cabin", "cable", "cactus", "camera", "candle", "canvas", "canyon", "carbon", "cargo",
    "carpet", "castle", "cattle", "cedar", "cellar", "census", "chain", "chair", "chalk", "chance",
    "change", "chapel", "charge", "charm", "chart", "chase", "cheese", "cherry", "chest", "chief",
    "child", "choir", "chorus", "circle", "citizen", "civil", "claim", "clay", "clean", "clear",
    "clerk", "cliff", "climb", "clock", "cloth", "cloud", "clover", "coach", "coast", "cobalt",
    "coffee", "collar", "colony", "column", "combat", "comet", "common", "copper", "coral",
    "corner", "cotton", "county", "course", "cousin", "cover", "crane", "crater", "cream",
    "credit", "creek", "crest", "cricket", "crimson", "crisp", "cross", "crowd", "crown",
    "crystal", "curve", "cycle", "dairy", "daisy", "dance", "dawn", "decade", "deer", "delta",
    "denim", "depth", "desert", "design", "desk", "detail", "device", "dial", "diamond", "digit",
    "dinner", "dome", "donor", "double", "dozen", "draft", "dragon", "drawer", "dream", "drift",
    "drive", "duck", "dune", "dusk", "dust", "eagle", "early", "earth", "east", "echo", "edge",
    "effort", "eight", "elbow", "elder", "elect", "element", "eleven", "elite", "ember", "empire",
    "energy", "engine", "enjoy", "enter", "entry", "equal", "error", "escape", "estate", "ethic",
    "event", "exact", "exit", "extra", "fabric", "factor", "falcon", "family", "fancy", "farm",
    "feather", "fellow", "fence", "fern", "ferry", "fever", "fiber", "field", "fifth", "figure",
    "filter", "final", "finch", "finger", "fire", "first", "flame", "flash", "fleet", "flint",
    "floor", "flour", "flower", "fluid", "flute", "focus", "forest", "forge", "formal", "fortune",
    "forum", "fossil", "found", "fountain", "frame", "fresh", "frost", "fruit", "futures",
    "galaxy", "garden", "garlic", "gather", "gentle", "giant", "ginger", "glacier", "glass",
    "globe", "glory", "gold", "goose", "grace", "grain", "grand", "granite", "grape", "grass",
    "gravel", "green", "grove", "guard",
];
