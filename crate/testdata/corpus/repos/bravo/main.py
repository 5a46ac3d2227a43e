# Content pipeline entry points. Planted: five moving aliases (NMVP x5);
# all other configuration is explicit.

from openai import OpenAI

client = OpenAI(timeout=45.0, max_retries=4)


def outline(topic):
    response = client.chat.completions.create(
        model="gpt-4o",
        messages=[
            {"role": "system", "content": "Produce a five-point outline."},
            {"role": "user", "content": topic},
        ],
        max_tokens=250,
        temperature=0.4,
    )
    return response.choices[0].message.content


def draft(outline_text):
    response = client.chat.completions.create(
        model="gpt-4o-mini",
        messages=[
            {"role": "system", "content": "Write the article body."},
            {"role": "user", "content": outline_text},
        ],
        max_tokens=900,
        temperature=0.7,
    )
    return response.choices[0].message.content


def edit(draft_text):
    response = client.chat.completions.create(
        model="gpt-4.1",
        messages=[
            {"role": "system", "content": "Edit for grammar and tone."},
            {"role": "user", "content": draft_text},
        ],
        max_tokens=900,
        temperature=0.2,
    )
    return response.choices[0].message.content


def headline(draft_text):
    response = client.chat.completions.create(
        model="gpt-4-turbo",
        messages=[
            {"role": "system", "content": "Write a headline."},
            {"role": "user", "content": draft_text},
        ],
        max_tokens=24,
        temperature=0.9,
    )
    return response.choices[0].message.content


def tags(draft_text):
    response = client.chat.completions.create(
        model="gpt-3.5-turbo",
        messages=[
            {"role": "system", "content": "Suggest five tags."},
            {"role": "user", "content": draft_text},
        ],
        max_tokens=40,
        temperature=0.3,
    )
    return response.choices[0].message.content
