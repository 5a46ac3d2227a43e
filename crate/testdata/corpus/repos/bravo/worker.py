# Background enrichment jobs. Planted: four moving aliases (NMVP x4).

from openai import OpenAI

client = OpenAI(timeout=60.0, max_retries=1)


def translate(text, language):
    response = client.chat.completions.create(
        model="gpt-4o",
        messages=[
            {"role": "system", "content": "Translate into " + language + "."},
            {"role": "user", "content": text},
        ],
        max_tokens=800,
        temperature=0.0,
    )
    return response.choices[0].message.content


def moderate(text):
    response = client.chat.completions.create(
        model="gpt-4.1-mini",
        messages=[
            {"role": "system", "content": "Answer SAFE or UNSAFE."},
            {"role": "user", "content": text},
        ],
        max_tokens=4,
        temperature=0.0,
    )
    return response.choices[0].message.content


def embed_caption(alt_text):
    response = client.chat.completions.create(
        model="gpt-5",
        messages=[
            {"role": "system", "content": "Expand alt text into a caption."},
            {"role": "user", "content": alt_text},
        ],
        max_tokens=80,
        temperature=0.5,
    )
    return response.choices[0].message.content


def transcribe_summary(transcript):
    response = client.chat.completions.create(
        model="gpt-4o-audio-preview",
        messages=[
            {"role": "system", "content": "Summarize the call transcript."},
            {"role": "user", "content": transcript},
        ],
        max_tokens=300,
        temperature=0.2,
    )
    return response.choices[0].message.content
