#!/usr/bin/env python3
"""Regenerate the synthetic toy corpus under data/toy/.

Each document is a list of EDUs joined by single spaces. Relations point at
single EDUs (int) or contiguous EDU ranges (tuple, inclusive), which become
combined spans. Offsets are counted in Unicode scalar values.
"""
import os

DOCS = [
    ("archer-return", [
        "England pace bowler Jofra Archer could play in this year's T20 World Cup but",
        "will not play test cricket until 2025,",
        "according to England managing director Rob Key.",
        "Archer's England career has been plagued by injuries",
        "and he has not played a test match since the tour of India in 2021.",
        "Because of a stress fracture in his elbow,",
        "he missed the whole of the last summer.",
    ], [
        (0, 1, "Contrast"),
        ((0, 1), 2, "Background"),
        (3, 4, "Elaboration"),
        (5, 6, "Cause-Effect"),
        (3, 6, "Elaboration"),
    ]),
    ("lords-final", [
        "The final at Lord's began under grey skies.",
        "Rain delayed the toss by an hour,",
        "so the match was reduced to forty overs a side.",
        "Kent won the toss and chose to bowl.",
        "Their openers then removed both Surrey openers inside five overs.",
        "Although Surrey recovered through a patient fifty from Pope,",
        "they never reached a competitive total.",
    ], [
        (1, 2, "Cause-Effect"),
        (3, 4, "Narration"),
        (5, 6, "Concession"),
        (0, 1, "Background"),
        (2, 3, "Narration"),
    ]),
    ("spin-twins", [
        "India picked two left-arm spinners for the Chennai test.",
        "The pitch was expected to turn from the second day.",
        "Jadeja bowled tightly from one end",
        "and Axar attacked the stumps from the other.",
        "The visitors had prepared on green practice wickets,",
        "yet they handled the turning ball with surprising ease.",
    ], [
        (1, 0, "Background"),
        (2, 3, "Joint"),
        (4, 5, "Contrast"),
        (0, (2, 3), "Elaboration"),
    ]),
    ("captaincy", [
        "Stokes confirmed he will remain captain for the Ashes.",
        "In other words, the selectors have backed his aggressive approach.",
        "He admitted the team had made mistakes in the field,",
        "but insisted the batting philosophy would not change.",
        "The board extended his contract by two years.",
        "He thanked the coaching staff for their support.",
    ], [
        (0, 1, "Restatement"),
        (2, 3, "Concession"),
        (0, 4, "Elaboration"),
        (4, 5, "Narration"),
    ]),
    ("collapse", [
        "Pakistan lost seven wickets for thirty runs after lunch.",
        "The ball started to reverse swing on the dry surface,",
        "which made the lower order look helpless.",
        "Shafique batted for four hours",
        "and Babar added a composed eighty.",
        "The collapse handed the initiative to the hosts.",
        "Put simply, the session decided the match.",
    ], [
        (1, 2, "Cause-Effect"),
        (3, 4, "Joint"),
        ((0, 0), 5, "Cause-Effect"),
        (5, 6, "Restatement"),
        (0, 1, "Elaboration"),
    ]),
    ("debutant", [
        "The young leg-spinner made his debut at Headingley.",
        "He grew up playing on the tennis-ball circuit in Leeds.",
        "His first over went for fifteen runs,",
        "but he returned to take three wickets in the evening session.",
        "He then dismissed the captain with a googly on the final morning.",
        "Even though he is only nineteen,",
        "he already looks ready for international cricket.",
    ], [
        (1, 0, "Background"),
        (2, 3, "Contrast"),
        (3, 4, "Narration"),
        (5, 6, "Concession"),
        (0, 2, "Narration"),
    ]),
    ("heatwave", [
        "Temperatures in Adelaide reached forty-two degrees on day two.",
        "Umpires allowed extra drinks breaks every hour",
        "and the players wore ice vests between overs.",
        "The heat slowed the fast bowlers considerably,",
        "so the spinners bowled most of the afternoon overs.",
        "The match referee said conditions were safe.",
    ], [
        (1, 2, "Joint"),
        (0, (1, 2), "Cause-Effect"),
        (3, 4, "Cause-Effect"),
        (0, 5, "Elaboration"),
    ]),
    ("record-chase", [
        "South Africa chased down four hundred and thirty-five runs.",
        "That is, they completed the highest successful chase in one-day history.",
        "Gibbs struck one hundred and seventy-five from just one hundred and eleven balls",
        "while Smith added a brisk ninety at the other end.",
        "Australia had earlier posted what looked like a winning total.",
        "Ponting hit one hundred and sixty-four in that innings.",
    ], [
        (0, 1, "Restatement"),
        (2, 3, "Joint"),
        (4, 0, "Background"),
        (4, 5, "Elaboration"),
        (2, 3, "Elaboration"),
    ]),
    ("bazball", [
        "New Zealand scored at six runs an over on the opening day.",
        "Critics called the approach reckless,",
        "although the results have been strong.",
        "The openers added one hundred before lunch.",
        "After the interval the middle order continued the assault.",
        "The tactic is, in short, relentless attack.",
    ], [
        (1, 2, "Concession"),
        (3, 4, "Narration"),
        (0, 5, "Restatement"),
        (0, 3, "Elaboration"),
    ]),
    ("injury-blow", [
        "Australia's fast bowler tore a hamstring during the warm-up.",
        "He will miss the rest of the series,",
        "meaning the selectors must call up a replacement.",
        "The team doctor examined him on the outfield",
        "and the physio strapped his leg before the scan.",
        "The squad had already lost two bowlers to injury this summer.",
    ], [
        (0, 1, "Cause-Effect"),
        (1, 2, "Cause-Effect"),
        (3, 4, "Joint"),
        (5, 0, "Background"),
    ]),
    ("rain-draw", [
        "Only thirty overs were possible across the final two days.",
        "Rain swept in from the west on Saturday morning.",
        "The covers stayed on until late afternoon.",
        "England were well placed to win,",
        "but the weather denied them a series lead.",
        "The draw, in other words, suited the tourists.",
    ], [
        (1, 0, "Cause-Effect"),
        (1, 2, "Narration"),
        (3, 4, "Contrast"),
        ((3, 4), 5, "Restatement"),
        (0, 3, "Background"),
    ]),
    ("womens-ashes", [
        "The women's Ashes opened with a day-night test in Canberra.",
        "Lanning's side arrived as heavy favourites,",
        "yet England dominated the first session.",
        "Sciver struck a fluent century",
        "and Ecclestone claimed five wickets.",
        "Although the hosts fought back on day three,",
        "England still won by sixty runs.",
        "The trophy now moves to the one-day series.",
    ], [
        (1, 2, "Contrast"),
        (3, 4, "Joint"),
        (5, 6, "Concession"),
        (6, 7, "Narration"),
        (0, 1, "Background"),
        (0, (3, 4), "Elaboration"),
    ]),
]


def main():
    here = os.path.dirname(os.path.abspath(__file__))
    out = os.path.join(here, "..", "data", "toy")
    os.makedirs(out, exist_ok=True)
    for doc_id, edus, rels in DOCS:
        starts, pos = [], 0
        for e in edus:
            starts.append(pos)
            pos += len(e) + 1
        text = " ".join(edus)
        spans, lines = {}, []

        def span_for(ref):
            if isinstance(ref, int):
                sid = f"e{ref + 1}"
                rng = (ref, ref)
            else:
                rng = ref
                sid = f"e{ref[0] + 1}" if ref[0] == ref[1] else f"e{ref[0] + 1}-{ref[1] + 1}"
            if sid not in spans:
                a, b = rng
                spans[sid] = (starts[a], starts[b] + len(edus[b]))
            return sid

        rel_lines = []
        for src, tgt, label in rels:
            rel_lines.append(f"REL {span_for(src)} {span_for(tgt)} {label}")
        for i in range(len(edus)):
            span_for(i)
        lines.append(f"#DOC {doc_id}")
        lines.append("# synthetic cricket report; offsets in characters")
        lines.append(f"#TEXT {text}")
        lines.append("")
        for sid, (s, e) in sorted(spans.items(), key=lambda kv: (kv[1][0], -kv[1][1])):
            lines.append(f"SPAN {sid} {s} {e}")
        lines.append("")
        lines.extend(rel_lines)
        with open(os.path.join(out, f"{doc_id}.rsta"), "w", encoding="utf-8") as f:
            f.write("\n".join(lines) + "\n")


if __name__ == "__main__":
    main()
