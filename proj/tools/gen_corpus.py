#!/usr/bin/env python3
"""Generates the bundled synthetic maildir corpus and its evaluation scenarios.

Each scenario owns two kinds of relevant messages: keyword messages that
state the query terms verbatim inside long unrelated threads, and paraphrase
messages that use inflected forms or synonyms of those terms in short notes.
Everything is driven by a fixed seed, so reruns produce identical bytes.
"""

import argparse
import json
import random
import shutil
from datetime import datetime, timedelta, timezone
from pathlib import Path

SEED = 20011202

PEOPLE = [
    ("Kenneth Lay", "kenneth.lay@enron.com"),
    ("Jeff Skilling", "jeff.skilling@enron.com"),
    ("Andrew Fastow", "andrew.fastow@enron.com"),
    ("Sherron Watkins", "sherron.watkins@enron.com"),
    ("John Lavorato", "john.lavorato@enron.com"),
    ("Louise Kitchen", "louise.kitchen@enron.com"),
    ("Richard Causey", "richard.causey@enron.com"),
    ("Vince Kaminski", "vince.kaminski@enron.com"),
    ("Sara Shackleton", "sara.shackleton@enron.com"),
    ("Tana Jones", "tana.jones@enron.com"),
    ("Mark Taylor", "mark.taylor@enron.com"),
    ("Kay Mann", "kay.mann@enron.com"),
    ("Greg Whalley", "greg.whalley@enron.com"),
    ("David Delainey", "david.delainey@enron.com"),
    ("Rick Buy", "rick.buy@enron.com"),
    ("Ben Glisan", "ben.glisan@enron.com"),
]

FOLDERS = ["inbox", "sent_items", "deal_discussions", "all_documents", "notes_inbox", "discussion_threads"]

# (scenario id, query, keyword sentences, paraphrase sentences)
TOPICS = [
    ("S01", "raptor hedging vehicle",
     ["The raptor hedging vehicle needs another capital injection before the quarter closes.",
      "Our raptor hedging vehicle is short of credit capacity again.",
      "Who signed off on restructuring the raptor hedging vehicle?"],
     ["Those raptors were built to hedge the merchant book and now the vehicles are underwater.",
      "Both raptors keep losing value; the hedges they wrote are worthless.",
      "Arthur Andersen wants a memo on how the raptors hedged our tech stock positions."]),
    ("S02", "shred audit documents",
     ["Please shred the audit documents from the Houston office by Friday.",
      "Legal says we should not shred any audit documents right now.",
      "Someone asked me whether we shred audit documents after the engagement."],
     ["Shredding of audited paperwork started on the nineteenth floor this morning.",
      "The shredders were running all night next to the auditors' workpapers.",
      "Stop destroying audit paperwork immediately; the retention notice is out."]),
    ("S03", "california blackout curtailment",
     ["Rolling california blackout curtailment orders hit the grid at noon.",
      "The ISO issued another california blackout curtailment notice for stage three.",
      "Can you model the california blackout curtailment exposure for next week?"],
     ["Californian outages forced the grid operator to curtail load across the north.",
      "Blackouts across Californian utilities mean more curtailments tomorrow.",
      "Power outage alerts again; they curtailed deliveries to the Californian buyers."]),
    ("S04", "prepay transaction citibank",
     ["The prepay transaction with citibank closes on the last business day.",
      "Treasury wants the citibank prepay transaction booked as trading liabilities.",
      "Do we have a second prepay transaction lined up with citibank?"],
     ["Prepaid swaps with Citi were treated as debt by the rating agencies.",
      "Those prepaids with Citigroup look like loans dressed up as commodity trades.",
      "Another prepaid deal through Citi is being papered for December."]),
    ("S05", "broadband bandwidth trading",
     ["Broadband bandwidth trading volumes are still tiny compared to the plan.",
      "The board asked whether broadband bandwidth trading can ever be profitable.",
      "We need a new broadband bandwidth trading desk head in Portland."],
     ["Our bandwidth traders have not closed a real trade on the broadband network all month.",
      "The telecom capacity desk keeps booking bandwidths to itself.",
      "Fiber capacity swaps with Qwest were the only broadband trades last quarter."]),
    ("S06", "ljm partnership conflict",
     ["The ljm partnership conflict of interest needs board approval again.",
      "Analysts are asking about the ljm partnership conflict in the proxy.",
      "I raised the ljm partnership conflict issue with Causey twice."],
     ["LJM2 partnerships are run by our own CFO, which is a glaring conflicted arrangement.",
      "Those partnerships managed by Fastow create conflicts the board waived.",
      "The LJM1 partnerships bought assets we could not sell anywhere else; conflicted doesn't cover it."]),
    ("S07", "whitewing collateral trigger",
     ["If the stock falls below the whitewing collateral trigger we owe the investors.",
      "Moody's noticed the whitewing collateral trigger language in the notes.",
      "Please send the whitewing collateral trigger calculation to treasury."],
     ["Whitewings collateralized notes unwind once the share price triggers are hit.",
      "The triggers in Whitewing collateralization documents worry the rating agencies.",
      "Price triggers on Whitewing could force us to issue shares to cover the collateralized debt."]),
    ("S08", "dabhol plant arbitration",
     ["The dabhol plant arbitration hearing was moved to London.",
      "Counsel expects the dabhol plant arbitration to drag into next year.",
      "Any update on the dabhol plant arbitration with the state board?"],
     ["Dabhol's power plants sit idle while the arbitrators argue over the tariff.",
      "The Maharashtra board refuses to pay; arbitrating in London is the only route for the plants.",
      "Plants at Dabhol are mothballed pending an arbitral ruling."]),
]

FILLER = [
    "Lunch is at the usual place on Thursday if anyone is around.",
    "The fantasy football draft has been moved to Tuesday evening.",
    "Please remember to submit expense reports before the end of the month.",
    "The parking garage will be closed for cleaning this weekend.",
    "I will be out of the office on vacation until Monday.",
    "Attached is the updated org chart for the trading floor.",
    "Can you send me the phone list for the new analysts?",
    "The United Way campaign kicks off next week in the lobby.",
    "Reminder that the building fire drill is scheduled for Wednesday.",
    "My flight to Omaha was delayed so I will join the call late.",
    "The holiday party committee needs two more volunteers.",
    "IT will upgrade the email servers overnight on Saturday.",
    "Please review the draft confidentiality agreement and mark up any changes.",
    "The gas desk posted solid numbers for the month.",
    "We should schedule a meeting to discuss the storage contract renewal.",
    "The interns start on the first of June and need desks.",
    "Thanks for the tickets to the Astros game last night.",
    "Weather forecasts show a cold front arriving on Sunday.",
    "Let me know if the conference room on thirty two is free.",
    "The master netting agreement still needs a signature from their side.",
    "Natural gas prices spiked again on the Henry Hub index.",
    "Human resources is updating the performance review calendar.",
    "The pipeline maintenance window starts after the long weekend.",
    "Please forward the invoice to accounts payable for processing.",
    "The research group published a new weather derivatives note.",
    "Our team dinner is booked for seven at the steakhouse downtown.",
    "The credit group approved the new counterparty limits.",
    "I left the signed copies on your chair this afternoon.",
    "The trading simulator training session is full, sorry.",
    "We are still waiting for the ISDA schedule from their lawyers.",
    "The Calgary office wants to borrow two structurers for a month.",
    "Please update the risk book before the morning meeting.",
    "The power desk is hiring another scheduler for the west region.",
    "Congratulations on closing the Midwest tolling deal.",
    "The quarterly offsite agenda is attached for comments.",
    "Traffic on the Katy freeway made me miss the early call.",
    "The coffee machine on forty is broken again.",
    "We need volunteers to judge the science fair at the school.",
    "The compliance training deadline is next Friday.",
    "Could you check the confirmation for the April swap?",
]


def addr(person):
    return f"{person[0]} <{person[1]}>"


def sentences(rng, n):
    return " ".join(rng.choice(FILLER) for _ in range(n))


def paragraphs(rng, count, per):
    return "\n\n".join(sentences(rng, per) for _ in range(count))


class Writer:
    def __init__(self, root, rng):
        self.root = root
        self.rng = rng
        self.start = datetime(2000, 6, 1, 8, 0, tzinfo=timezone.utc)
        self.counter = 0

    def write(self, message_id, sender, to, cc, subject, body, extra_headers=()):
        self.counter += 1
        rng = self.rng
        folder = rng.choice(FOLDERS)
        owner = sender[1].split("@")[0].replace(".", "-")
        sent = self.start + timedelta(hours=7 * self.counter + rng.randrange(5), minutes=rng.randrange(60))
        date = sent.strftime("%a, %d %b %Y %H:%M:%S -0000")
        lines = [
            f"Message-ID: <{message_id}>",
            f"Date: {date}",
            f"From: {sender[1]}",
            f"To: {', '.join(p[1] for p in to)}",
        ]
        if cc:
            lines.append(f"Cc: {', '.join(p[1] for p in cc)}")
        lines += [
            f"Subject: {subject}",
            "Mime-Version: 1.0",
            "Content-Type: text/plain; charset=us-ascii",
            "Content-Transfer-Encoding: 7bit",
            f"X-From: {sender[0]}",
            f"X-To: {', '.join(p[0] for p in to)}",
            f"X-cc: {', '.join(p[0] for p in cc)}",
            "X-bcc: ",
            f"X-Folder: \\{sender[0].replace(' ', '_')}_Jun2001\\Notes Folders\\{folder}",
            f"X-Origin: {sender[0].split()[-1]}-{sender[0][0]}",
            f"X-FileName: {owner}.nsf",
        ]
        lines += list(extra_headers)
        text = "\n".join(lines) + "\n\n" + body.rstrip() + "\n"
        path = self.root / owner / folder / f"{self.counter}."
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(text.encode("utf-8"))
        return message_id, sent


def forwarded(rng, inner_sender, inner_to, inner_subject, inner_body, when):
    header = [
        "-----Original Message-----",
        f"From: \t{inner_sender[0]}  ",
        f"Sent:\t{when.strftime('%A, %B %d, %Y %I:%M %p')}",
        f"To:\t{inner_to[0]}",
        f"Subject:\t{inner_subject}",
    ]
    return "\n".join(header) + "\n\n" + inner_body


def keyword_body(rng, sentence):
    # One long paragraph of chatter with the keyword sentence somewhere inside.
    parts = [rng.choice(FILLER) for _ in range(rng.randint(26, 32))]
    parts.insert(rng.randrange(len(parts) + 1), sentence)
    return " ".join(parts)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="data", help="output directory")
    parser.add_argument("--total", type=int, default=1000, help="number of messages")
    args = parser.parse_args()

    out = Path(args.out)
    corpus = out / "corpus"
    if corpus.exists():
        shutil.rmtree(corpus)
    rng = random.Random(SEED)
    writer = Writer(corpus, rng)

    scenarios = []
    for sid, query, kw_sentences, para_sentences in TOPICS:
        relevant = []
        slug = sid.lower()
        for i, sentence in enumerate(kw_sentences):
            sender, *rest = rng.sample(PEOPLE, 4)
            to, cc = rest[:2], rest[2:]
            body = keyword_body(rng, sentence)
            subject = rng.choice(["Follow up", "Update", "Re: weekly notes", "Status", "Misc items"])
            if i == 1:
                inner = rng.choice(PEOPLE)
                body = sentences(rng, 2) + "\n\n" + forwarded(
                    rng, inner, [sender], "notes from the meeting", body, writer.start + timedelta(days=i))
            mid = f"{slug}.kw{i + 1}.{rng.randrange(10**6):06d}@evidex.test"
            writer.write(mid, sender, to, cc, subject, body)
            relevant.append(mid)
        for i, sentence in enumerate(para_sentences):
            sender, *rest = rng.sample(PEOPLE, 2)
            body = sentence + " " + sentences(rng, 1)
            mid = f"{slug}.para{i + 1}.{rng.randrange(10**6):06d}@evidex.test"
            writer.write(mid, sender, rest, [], rng.choice(["Quick note", "FYI", "Heads up", ""]), body)
            relevant.append(mid)
        scenarios.append({"scenario_id": sid, "nl_query": query, "relevant_doc_ids": relevant,
                          "notes": "3 keyword messages, 3 paraphrase messages"})

    filler_count = args.total - writer.counter
    for i in range(filler_count):
        sender, *rest = rng.sample(PEOPLE, rng.randint(2, 4))
        to, cc = rest[:1], rest[1:]
        if rng.random() < 0.6:
            body = " ".join(rng.choice(FILLER) for _ in range(rng.randint(20, 32)))
        else:
            body = paragraphs(rng, rng.randint(1, 3), rng.randint(2, 4))
        if i % 9 == 0:
            inner = rng.choice(PEOPLE)
            body = sentences(rng, 1) + "\n\n" + forwarded(
                rng, inner, [sender], "schedule", paragraphs(rng, 1, 3), writer.start + timedelta(days=i))
        mid = f"misc.{i + 1:03d}.{rng.randrange(10**6):06d}@evidex.test"
        writer.write(mid, sender, to, cc, rng.choice(["Lunch", "Schedule", "Reminder", "Weekend", "Re: hello"]), body)

    (out / "scenarios.json").write_text(json.dumps(scenarios, indent=2) + "\n")
    print(f"wrote {writer.counter} messages and {len(scenarios)} scenarios to {out}")


if __name__ == "__main__":
    main()
