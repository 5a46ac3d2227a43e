# Text-rewriting helpers. Planted: three moving aliases (NMVP x3) and one
# pinned call with no temperature (TNES x1).

from openai import OpenAI

client = OpenAI(timeout=20.0, max_retries=3)


def rewrite(text):
    response = client.chat.completions.create(
        model="gpt-4.1",
        messages=[
            {"role": "system", "content": "Rewrite for clarity."},
            {"role": "user", "content": text},
        ],
        max_tokens=300,
        temperature=0.5,
    )
    return response.choices[0].message.content


def expand(text):
    response = client.chat.completions.create(
        model="gpt-4.1-mini",
        messages=[
            {"role": "system", "content": "Expand the outline."},
            {"role": "user", "content": text},
        ],
        max_tokens=500,
        temperature=0.6,
    )
    return response.choices[0].message.content


def shorten(text):
    response = client.chat.completions.create(
        model="gpt-4o-mini",
        messages=[
            {"role": "system", "content": "Shorten to one sentence."},
            {"role": "user", "content": text},
        ],
        max_tokens=60,
        temperature=0.1,
    )
    return response.choices[0].message.content


def title_case(text):
    response = client.chat.completions.create(
        model="gpt-4o-2024-11-20",
        messages=[
            {"role": "system", "content": "Convert to a headline."},
            {"role": "user", "content": text},
        ],
        max_tokens=30,
    )
    return response.choices[0].message.content
