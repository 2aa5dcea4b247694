"""Builds the golden ingest fixture and its expected outputs.

The expected files are computed here, in Python, directly from the corpus
rules, without calling the C++ code. Re-run after editing the fixture:

    python3 tests/data/golden/make_golden.py
"""

import json
import math
import os
import statistics

import regex

HERE = os.path.dirname(os.path.abspath(__file__))
EXPECTED = os.path.join(HERE, "expected")

TEST_MIN_RESPONSES = 60

WHITESPACE = set("\t\n\x0b\x0c\r \x85\xa0\u1680\u2028\u2029\u202f\u205f\u3000") | {
    chr(c) for c in range(0x2000, 0x200B)
}
EMOJI = regex.compile(
    r"[\p{Extended_Pictographic}\uFE0E\uFE0F\U0001F1E6-\U0001F1FF"
    r"\U0001F3FB-\U0001F3FF\u20E3\U000E0020-\U000E007F]"
)
ZWJ = "\u200d"


def strip_emoji(s):
    is_emoji = [EMOJI.match(c) is not None for c in s]
    keep = []
    for i, c in enumerate(s):
        if is_emoji[i]:
            continue
        if c == ZWJ and ((i > 0 and is_emoji[i - 1]) or (i + 1 < len(s) and is_emoji[i + 1])):
            continue
        keep.append(c)
    return "".join(keep)


def link_start(s, i):
    low = s[i:i + 8].lower()
    if low.startswith("http://") or low.startswith("https://"):
        return True
    if s[i:i + 5].lower() != "t.co/":
        return False
    if i == 0:
        return True
    prev = s[i - 1]
    return not (prev.isascii() and prev.isalnum()) and prev not in "./"


def strip_links(s):
    out = []
    i = 0
    while i < len(s):
        if link_start(s, i):
            while i < len(s) and s[i] not in WHITESPACE:
                i += 1
        else:
            out.append(s[i])
            i += 1
    return "".join(out)


def collapse(s):
    words = []
    cur = []
    for c in s:
        if c in WHITESPACE:
            if cur:
                words.append("".join(cur))
                cur = []
        else:
            cur.append(c)
    if cur:
        words.append("".join(cur))
    return " ".join(words)


def clean(s):
    return collapse(strip_links(strip_emoji(s)))


def id_key(i):
    return (0, len(i.lstrip("0") or "0"), i.lstrip("0") or "0") if i.isdigit() else (1, 0, i)


# --------------------------------------------------------------------------
# Fixture
# --------------------------------------------------------------------------

lines = []
next_id = [1300000000000000000]


def new_id():
    next_id[0] += 1
    return str(next_id[0])


def record(text, author, in_reply_to=None, quoted=None, rid=None, ts="2021-01-05T10:00:00Z"):
    rid = rid or new_id()
    lines.append(json.dumps({
        "id": rid, "text": text, "author": author, "created_at": ts,
        "in_reply_to_id": in_reply_to, "quoted_id": quoted,
    }, ensure_ascii=False))
    return rid


def responses(target, n, label, start_user=0, quote_every=7):
    ids = []
    for k in range(n):
        text = f"{label} reply {k}"
        if k % 5 == 1:
            text += " https://t.co/Ab12Cd"
        if k % 6 == 2:
            text = "\U0001F637 " + text + " \U0001F44D\U0001F3FD"
        if k % 11 == 3:
            text = "  " + text.replace(" ", "\n\t ", 1) + "  "
        quoted = target if k % quote_every == 4 else None
        reply = None if quoted else target
        ids.append(record(text, f"user{start_user + k}", in_reply_to=reply, quoted=quoted))
    return ids


# Admitted at exactly 60 after one response cleans to nothing.
m1 = record("Get vaccinated today \U0001F489 https://t.co/x1 #COVID19", "WHO")
responses(m1, 60, "m1")
record("\U0001F621\U0001F621 https://t.co/zzz", "angry", in_reply_to=m1)

# 59 responses: stays in train. Short ids exercise numeric ordering.
m2 = record("Wash your hands often.", "CDCgov", rid="990")
for k in range(59):
    record(f"m2 response {k}", f"fan{k}", in_reply_to=m2, rid=str(1020 - k))

# Same-author duplicates (author differs in case only, text differs only in
# links and emoji): neither reaches test; train keeps the lowest id.
m3 = record("Boosters are available for adults 18+ http://cdc.gov/boost", "CDCgov")
responses(m3, 65, "m3")
m4 = record("Boosters are available for adults 18+ \u2764\ufe0f", "cdcgov")
responses(m4, 61, "m4")

# Identical text, different author: not a duplicate. ECDC's thread reaches
# test, so WHO's small train thread with the same text is removed.
m5 = record("Wear a mask indoors.", "ECDC_EU")
responses(m5, 62, "m5", quote_every=3)
m6 = record("Wear a mask   indoors. https://who.int/mask", "WHO")
responses(m6, 3, "m6")

# A small train thread with a duplicate response text, a reply that also
# quotes, and responses listed out of id order.
m7 = record("Flu season is here \U0001F1FA\U0001F1F8", "CDCgov")
r7 = [new_id() for _ in range(4)]
record("same words", "a", in_reply_to=m7, rid=r7[3])
record("same words", "b", in_reply_to=m7, rid=r7[1])
record("reply and quote", "c", in_reply_to=m7, quoted=m6, rid=r7[0])
record("t.co/abc stays? no: t.co/abc is a link but not.t.co/abc", "d", quoted=m7, rid=r7[2])

# Not a thread: unlisted target, dangling reference, message cleaning to
# nothing.
m8 = record("random person's post", "someone")
responses(m8, 3, "m8")
record("reply to a deleted tweet", "e", in_reply_to="1")
m9 = record("https://t.co/only \U0001F4F0", "WHO")
responses(m9, 2, "m9")

# Malformed lines and a duplicate id.
lines.append("{not json")
lines.append(json.dumps({"id": "5", "text": "x", "author": "y"}))
lines.append(lines[1])

with open(os.path.join(HERE, "archive.jsonl"), "w", encoding="utf-8") as f:
    f.write("\n".join(lines) + "\n")
with open(os.path.join(HERE, "allowlist.txt"), "w", encoding="utf-8") as f:
    f.write("# accounts in the golden fixture\nWHO\nCDCgov\necdc_eu\n")

# --------------------------------------------------------------------------
# Oracle
# --------------------------------------------------------------------------

allow = {"who", "cdcgov", "ecdc_eu"}
records = {}
order = []
for line in lines:
    try:
        r = json.loads(line)
    except json.JSONDecodeError:
        continue
    if set(r) != {"id", "text", "author", "created_at", "in_reply_to_id", "quoted_id"}:
        continue
    if r["id"] in records:
        continue
    records[r["id"]] = r
    order.append(r["id"])

attached = {}
for rid in order:
    r = records[rid]
    target = r["in_reply_to_id"] or r["quoted_id"]
    if not target or target not in records:
        continue
    if records[target]["author"].lower() not in allow:
        continue
    attached.setdefault(target, []).append(r)

threads = []
for mid, resps in attached.items():
    msg = records[mid]
    ct = clean(msg["text"])
    if not ct:
        continue
    out = []
    for r in sorted(resps, key=lambda r: id_key(r["id"])):
        c = clean(r["text"])
        if c:
            out.append({"id": r["id"], "raw_text": r["text"], "clean_text": c})
    if out:
        threads.append({"message_id": mid, "author": msg["author"], "raw_text": msg["text"],
                        "clean_text": ct, "responses": out})
threads.sort(key=lambda t: id_key(t["message_id"]))

groups = {}
for t in threads:
    groups.setdefault((t["author"].lower(), t["clean_text"]), []).append(t)
test, train = [], []
for members in groups.values():
    members.sort(key=lambda t: id_key(t["message_id"]))
    if len(members) > 1:
        train.append(members[0])
    elif len(members[0]["responses"]) >= TEST_MIN_RESPONSES:
        test.append(members[0])
    else:
        train.append(members[0])
test_texts = {t["clean_text"] for t in test}
train = [t for t in train if t["clean_text"] not in test_texts]
test.sort(key=lambda t: id_key(t["message_id"]))
train.sort(key=lambda t: id_key(t["message_id"]))

assert [len(t["responses"]) for t in test] == [60, 62], [len(t["responses"]) for t in test]


def dump(obj):
    return json.dumps(obj, ensure_ascii=False, sort_keys=True, separators=(",", ":"))


def stats_row(name, counts):
    n = len(counts)
    total = sum(counts)
    mean = total / n if n else 0.0
    sd = statistics.stdev(counts) if n > 1 else 0.0
    return f"{name},{n},{total},{mean:.6f},{sd:.6f},{math.floor(mean + 0.5):.0f} ± {math.floor(sd + 0.5):.0f}\n"


TOKENS = ("<|message|>", "<|author|>", "<|response|>", "<|endoftext|>")

os.makedirs(EXPECTED, exist_ok=True)
with open(os.path.join(EXPECTED, "threads.jsonl"), "w", encoding="utf-8") as f:
    for t in threads:
        f.write(dump(t) + "\n")
with open(os.path.join(EXPECTED, "test.jsonl"), "w", encoding="utf-8") as f:
    for t in test:
        f.write(dump(t) + "\n")
with open(os.path.join(EXPECTED, "train.jsonl"), "w", encoding="utf-8") as f, \
        open(os.path.join(EXPECTED, "train_prompts.txt"), "w", encoding="utf-8") as p:
    for t in train:
        for r in t["responses"]:
            f.write(dump({"message_id": t["message_id"], "author": t["author"], "message": t["clean_text"],
                          "response_id": r["id"], "response": r["clean_text"]}) + "\n")
            p.write(f"{TOKENS[0]}{t['clean_text']}{TOKENS[1]}{t['author']}{TOKENS[2]}{r['clean_text']}{TOKENS[3]}\n")
with open(os.path.join(EXPECTED, "stats.csv"), "w", encoding="utf-8") as f:
    f.write("set,messages,responses,mean_responses_per_message,sd_responses_per_message,display\n")
    f.write(stats_row("train", [len(t["responses"]) for t in train]))
    f.write(stats_row("test", [len(t["responses"]) for t in test]))

print(f"{len(lines)} archive lines, {len(threads)} threads, {len(train)} train / {len(test)} test messages")
