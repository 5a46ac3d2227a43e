# Document pipeline. Planted: three moving aliases (NMVP x3).

from openai import OpenAI

client = OpenAI(timeout=25.0, max_retries=2)


def extract_fields(document):
    response = client.chat.completions.create(
        model="gpt-4o",
        messages=[
            {"role": "system", "content": "Extract invoice fields."},
            {"role": "user", "content": document},
        ],
        max_tokens=350,
        temperature=0.0,
    )
    return response.choices[0].message.content


def redact(document):
    response = client.chat.completions.create(
        model="gpt-4-turbo",
        messages=[
            {"role": "system", "content": "Redact personal data."},
            {"role": "user", "content": document},
        ],
        max_tokens=700,
        temperature=0.0,
    )
    return response.choices[0].message.content


def caption(document):
    response = client.chat.completions.create(
        model="gpt-3.5-turbo",
        messages=[
            {"role": "system", "content": "Write a one-line caption."},
            {"role": "user", "content": document},
        ],
        max_tokens=30,
        temperature=0.8,
    )
    return response.choices[0].message.content
