# Code-review agents. Planted: two moving aliases (NMVP x2) and one pinned
# call without temperature (TNES x1).

import anthropic

client = anthropic.Anthropic(timeout=30.0, max_retries=2)


def review(diff):
    response = client.messages.create(
        model="claude-3-5-sonnet-latest",
        max_tokens=1024,
        system="You review diffs for correctness.",
        messages=[{"role": "user", "content": diff}],
        temperature=0.0,
    )
    return response.content[0].text


def label(issue_text):
    response = client.messages.create(
        model="claude-3-haiku",
        max_tokens=20,
        system="Label the issue with one tag.",
        messages=[{"role": "user", "content": issue_text}],
        temperature=0.0,
    )
    return response.content[0].text


def triage(issue_text):
    response = client.messages.create(
        model="claude-3-5-sonnet-20241022",
        max_tokens=200,
        system="Route the issue to a team.",
        messages=[{"role": "user", "content": issue_text}],
    )
    return response.content[0].text
