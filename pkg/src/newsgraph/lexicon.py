"""Embedded word lists: stop words, temporal and place lexicons, verb tables."""

from __future__ import annotations

# Function words used when reducing text to content words. Interrogatives and
# auxiliaries are listed on purpose: question matching must not score them.
STOP_WORDS = frozenset(
    """
    a an the this that these those there here
    i me my mine we us our ours you your yours he him his she her hers
    it its they them their theirs itself himself herself themselves myself
    who whom whose what which when where why how whether
    is am are was were be been being
    do does did done doing
    have has had having
    will would shall should can could may might must ought
    not no nor neither either
    and or but so yet if because as than then once
    of at by for with about against between into through during
    before after above below to from up down in out on off over under
    again further also just only very too quite rather
    all any both each few more most other some such own same
    please okay ok yes yeah oh well hmm really sure
    let lets us
    """.split()
)

GUARD_PRONOUNS = frozenset({"we", "i", "this", "it"})

MONTHS = frozenset(
    """january february march april may june july august september october
    november december""".split()
)

WEEKDAYS = frozenset(
    "monday tuesday wednesday thursday friday saturday sunday".split()
)

TEMPORAL_NOUNS = frozenset(
    """today yesterday tomorrow tonight week month year decade century
    morning afternoon evening night noon midnight spring summer autumn fall
    winter monday tuesday wednesday thursday friday saturday sunday""".split()
) | MONTHS

PLACE_NOUNS = frozenset(
    """city town country state region area province district street village
    capital office headquarters airport station port harbor school university
    hospital park building factory plant site place campus stadium museum
    island valley border coast""".split()
)

# NER labels that mark locations and times across common tag sets.
LOCATION_NER = frozenset(
    {"LOCATION", "GPE", "CITY", "COUNTRY", "STATE_OR_PROVINCE", "LOC", "FACILITY"}
)
TEMPORAL_NER = frozenset({"DATE", "TIME", "DURATION"})
PERSON_NER = frozenset({"PERSON", "PER"})
ORG_NER = frozenset({"ORGANIZATION", "ORG"})

# Simple past forms for verbs the suffix rules get wrong.
IRREGULAR_PAST = {
    "be": "was", "have": "had", "do": "did", "say": "said", "go": "went",
    "get": "got", "make": "made", "know": "knew", "think": "thought",
    "take": "took", "see": "saw", "come": "came", "find": "found",
    "give": "gave", "tell": "told", "become": "became", "leave": "left",
    "feel": "felt", "put": "put", "bring": "brought", "begin": "began",
    "keep": "kept", "hold": "held", "write": "wrote", "stand": "stood",
    "hear": "heard", "let": "let", "mean": "meant", "set": "set",
    "meet": "met", "run": "ran", "pay": "paid", "sit": "sat",
    "speak": "spoke", "lead": "led", "read": "read", "grow": "grew",
    "lose": "lost", "fall": "fell", "send": "sent", "build": "built",
    "understand": "understood", "draw": "drew", "break": "broke",
    "spend": "spent", "cut": "cut", "rise": "rose", "drive": "drove",
    "buy": "bought", "wear": "wore", "choose": "chose", "seek": "sought",
    "throw": "threw", "catch": "caught", "deal": "dealt", "win": "won",
    "forget": "forgot", "sell": "sold", "fight": "fought", "strike": "struck",
    "teach": "taught", "eat": "ate", "fly": "flew", "sing": "sang",
    "ring": "rang", "drink": "drank", "shake": "shook", "hang": "hung",
    "steal": "stole", "hide": "hid", "shoot": "shot", "spread": "spread",
    "sleep": "slept", "feed": "fed", "hit": "hit", "hurt": "hurt",
    "quit": "quit", "cost": "cost", "shut": "shut", "stick": "stuck",
    "swing": "swung", "tear": "tore", "wake": "woke", "freeze": "froze",
    "bend": "bent", "bind": "bound", "dig": "dug", "sink": "sank",
    "slide": "slid", "light": "lit", "lend": "lent", "swim": "swam",
}

PAST_TO_LEMMA = {past: lemma for lemma, past in IRREGULAR_PAST.items()}

# Verbs that double the final consonant before -ed.
DOUBLING_VERBS = frozenset(
    """stop plan grab drop ban rob hug jog chat trip slip wrap scan stir
    occur refer admit commit permit submit regret prefer control patrol
    equip ship shop spot pin sum""".split()
)

# Default profanity list for utterance purification, and the innocuous
# nouns substituted for it.
PROFANITY = (
    "damn", "dammit", "goddamn", "hell", "crap", "shit", "bullshit",
    "fuck", "fucking", "fucked", "ass", "asshole", "bastard", "bitch",
    "piss", "pissed", "dick", "douche", "jerk",
)

INNOCUOUS_NOUNS = (
    "kitten", "cupcake", "rainbow", "puppy", "daisy", "muffin", "pebble",
    "teapot",
)

# Reader comments matching these phrases carry no information worth keeping.
GENERIC_COMMENT_PHRASES = (
    "that's interesting",
    "that's cool",
    "nice",
    "wow",
    "interesting",
)

# Article boilerplate lines removed during ingestion.
BOILERPLATE_PATTERNS = (
    r"^\s*Image Credits?:",
    r"^\s*Read more:",
    r"^\s*Watch this video:",
)
